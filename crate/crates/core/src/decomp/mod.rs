//! Ring-specific drivers producing factorizations with canonical block
//! multisets.
//!
//! Every driver returns raw factors plus *placements*: a block together with
//! the factor columns it occupies. [`assemble`] sorts placements into the
//! canonical block order and permutes the factor columns to match, so the
//! middle factor is always the direct sum of the blocks in stored order.

pub mod classical;
pub mod double_complex;
pub mod dual;
pub mod integer;
pub mod jordan;

use crate::canonical::{check_supported, materialize, Block, BlockMultiset, DecompKind};
use crate::error::{Error, Result};
use crate::matrices::Matrix;
use crate::scalars::{RingId, Scalar};

pub use integer::herm_integer_canonical;

/// Tolerances shared by all drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    /// Residual tolerance for verification and self-adjointness checks.
    pub tol: f64,
    /// Eigenvalue and singular value clustering radius.
    pub cluster_tol: f64,
    /// Relative numerical rank threshold.
    pub rank_tol: f64,
    /// Largest graph component canonicalized by exhaustive search.
    pub integer_cap: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { tol: 1e-8, cluster_tol: 1e-6, rank_tol: 1e-10, integer_cap: integer::DEFAULT_SIZE_CAP }
    }
}

/// `M = left · S · right*` (SVD, spectral) or `M = left · S · right` with
/// `right = left⁻¹` (Jordan), where `S` is the direct sum of `blocks`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub kind: DecompKind,
    pub left: Matrix,
    pub right: Matrix,
    pub blocks: BlockMultiset,
    /// `‖recombine − M‖_max / (1 + ‖M‖_max)` at construction time.
    pub residual: f64,
}

impl Factorization {
    pub fn ring(&self) -> RingId {
        self.left.ring()
    }

    /// The block-diagonal middle factor.
    pub fn middle(&self) -> Result<Matrix> {
        materialize(&self.blocks, self.ring())
    }

    pub fn recombine(&self) -> Result<Matrix> {
        let s = self.middle()?;
        let right = match self.kind {
            DecompKind::Jordan => self.right.clone(),
            _ => self.right.adjoint(),
        };
        self.left.matmul(&s)?.matmul(&right)
    }

    /// Relative reconstruction residual against `m`.
    pub fn residual_against(&self, m: &Matrix) -> Result<f64> {
        Ok(self.recombine()?.max_diff(m)? / (1.0 + m.max_norm()))
    }
}

/// A block and the factor columns it occupies (`rows` index `left`, `cols`
/// index `right`).
#[derive(Debug, Clone)]
pub(crate) struct Placement {
    pub block: Block,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Placement {
    pub fn new(block: Block, rows: Vec<usize>, cols: Vec<usize>) -> Self {
        debug_assert_eq!(block.shape(), (rows.len(), cols.len()), "placement shape for {block}");
        Placement { block, rows, cols }
    }

    /// A square block on the same indices of both factors.
    pub fn diag(block: Block, idx: Vec<usize>) -> Self {
        Placement::new(block, idx.clone(), idx)
    }
}

/// Orders placements canonically and permutes the factors to match.
pub(crate) fn assemble(
    m: &Matrix,
    kind: DecompKind,
    left: Matrix,
    right: Matrix,
    mut placements: Vec<Placement>,
) -> Result<Factorization> {
    placements.sort_by(|a, b| a.block.canonical_cmp(&b.block));
    let rows: Vec<usize> = placements.iter().flat_map(|p| p.rows.iter().copied()).collect();
    let cols: Vec<usize> = placements.iter().flat_map(|p| p.cols.iter().copied()).collect();
    let right_dim = if kind == DecompKind::Jordan { right.rows() } else { right.cols() };
    if rows.len() != left.cols() || cols.len() != right_dim {
        return Err(Error::ShapeMismatch("placements do not cover the factors".into()));
    }
    let left = left.select_columns(&rows);
    let right = match kind {
        DecompKind::Jordan => right.select_rows(&cols),
        _ => right.select_columns(&cols),
    };
    let blocks = BlockMultiset::new(placements.into_iter().map(|p| p.block).collect());
    let mut f = Factorization { kind, left, right, blocks, residual: 0.0 };
    f.residual = f.residual_against(m)?;
    Ok(f)
}

/// Computes the canonical decomposition of `m` for `kind`.
pub fn decompose(m: &Matrix, kind: DecompKind, opts: &Options) -> Result<Factorization> {
    match kind {
        DecompKind::Svd => svd(m, opts),
        DecompKind::Spectral => spectral(m, opts),
        DecompKind::Jordan => jordan::jordan(m, opts),
    }
}

/// Unitary equivalence: `M = U S V*`.
pub fn svd(m: &Matrix, opts: &Options) -> Result<Factorization> {
    check_supported(m.ring(), DecompKind::Svd)?;
    match m.ring() {
        RingId::Zero => classical::zero_ring(m, DecompKind::Svd),
        RingId::Real => classical::svd::<f64>(m, opts),
        RingId::Complex => classical::svd::<num_complex::Complex64>(m, opts),
        RingId::Quaternion => classical::svd::<crate::scalars::Quaternion>(m, opts),
        RingId::DualTrivial | RingId::DualConj => dual::svd(m, opts),
        RingId::DoubleComplexSwap => double_complex::svd(m, opts),
        RingId::IntegerTrivial => Err(Error::UnsupportedRingKind { ring: m.ring(), kind: DecompKind::Svd }),
    }
}

/// Unitary similarity of a self-adjoint matrix: `M = V S V*`.
pub fn spectral(m: &Matrix, opts: &Options) -> Result<Factorization> {
    check_supported(m.ring(), DecompKind::Spectral)?;
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("spectral decomposition of a {}x{} matrix", m.rows(), m.cols())));
    }
    let herm_tol = opts.tol * (1.0 + m.max_norm());
    if !m.is_hermitian(herm_tol) {
        return Err(Error::NotHermitian);
    }
    match m.ring() {
        RingId::Zero => classical::zero_ring(m, DecompKind::Spectral),
        RingId::Real => classical::spectral::<f64>(m, opts),
        RingId::Complex => classical::spectral::<num_complex::Complex64>(m, opts),
        RingId::Quaternion => classical::spectral::<crate::scalars::Quaternion>(m, opts),
        RingId::DualTrivial | RingId::DualConj => dual::spectral(m, opts),
        RingId::DoubleComplexSwap => double_complex::spectral(m, opts),
        RingId::IntegerTrivial => integer::spectral(m, opts),
    }
}

pub use jordan::jordan;

/// The self-adjoint pair `(A, Aᵀ)` over ℂ ⊕ ℂ. Its spectral blocks
/// correspond one-to-one with the Jordan blocks of `A`.
pub fn pair_embedding(a: &Matrix) -> Result<Matrix> {
    if a.ring() != RingId::Complex {
        return Err(Error::RingMismatch(RingId::Complex, a.ring()));
    }
    if !a.is_square() {
        return Err(Error::ShapeMismatch("pair embedding needs a square matrix".into()));
    }
    Ok(Matrix::from_fn(RingId::DoubleComplexSwap, a.rows(), a.cols(), |i, j| {
        match (a.get(i, j), a.get(j, i)) {
            (Scalar::Complex(x), Scalar::Complex(y)) => Scalar::DoubleComplex(x, y),
            _ => unreachable!("ring checked above"),
        }
    }))
}

/// Image of SVD blocks of `M` under bordering: the spectral blocks that
/// `[[0, M*], [M, 0]]` must have.
///
/// Each singular block `G` becomes the pair `G ⊕ (−G)` up to similarity, and
/// each empty block contributes a zero eigenvalue.
pub fn bordered_image(svd_blocks: &BlockMultiset, ring: RingId) -> Result<BlockMultiset> {
    let mut out = Vec::new();
    for b in svd_blocks {
        match (b, ring) {
            (Block::EmptyRow | Block::EmptyCol, _) => out.push(Block::ZeroScalar),
            (Block::PosScalar(x), RingId::Real | RingId::Complex | RingId::Quaternion | RingId::DualConj) => {
                out.push(Block::SignedScalar(*x));
                out.push(Block::SignedScalar(-x));
            }
            (Block::DualScalar { x, y }, RingId::DualTrivial) => {
                out.push(Block::DualScalar { x: *x, y: *y });
                out.push(Block::DualScalar { x: -x, y: -y });
            }
            (Block::DualEps(y), RingId::DualTrivial) => {
                out.push(Block::DualEps(*y));
                out.push(Block::DualEps(-y));
            }
            (Block::DualEps(y), RingId::DualConj) => out.push(Block::DualRot2 { x: 0.0, y: *y }),
            (Block::DualRot2 { x, y }, RingId::DualConj) => {
                out.push(Block::DualRot2 { x: *x, y: *y });
                out.push(Block::DualRot2 { x: -x, y: *y });
            }
            _ => return Err(Error::UnsupportedRingKind { ring, kind: DecompKind::Svd }),
        }
    }
    Ok(BlockMultiset::new(out))
}

/// Scale used to turn relative thresholds into absolute ones.
pub(crate) fn scale_of(x: f64) -> f64 {
    x.max(1.0)
}
