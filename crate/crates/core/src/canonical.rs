//! Generator blocks, their normal forms, and multisets of blocks.
//!
//! A decomposition of `M` is a multiset of indecomposable blocks. Two
//! matrices are equivalent iff their multisets agree, so comparison happens
//! here rather than on factor matrices.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrices::Matrix;
use crate::scalars::{Dual, RingId, Scalar};

/// Which equivalence relation a decomposition respects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecompKind {
    /// `M = U S V*` with `U`, `V` unitary.
    Svd,
    /// `M = V S V*` with `V` unitary, `M` self-adjoint.
    Spectral,
    /// `M = P S P⁻¹` with `P` invertible.
    Jordan,
}

impl DecompKind {
    pub const ALL: [DecompKind; 3] = [DecompKind::Svd, DecompKind::Spectral, DecompKind::Jordan];

    pub fn name(self) -> &'static str {
        match self {
            DecompKind::Svd => "svd",
            DecompKind::Spectral => "spectral",
            DecompKind::Jordan => "jordan",
        }
    }
}

impl fmt::Display for DecompKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecompKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DecompKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown decomposition kind `{s}`")))
    }
}

/// An indecomposable canonical block.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    /// `[x]`, `x > 0`.
    PosScalar(f64),
    /// `[x]`, `x ≠ 0`; self-adjoint scalars keep their sign under similarity.
    SignedScalar(f64),
    /// `[x + yε]`.
    DualScalar { x: f64, y: f64 },
    /// `[yε]`.
    DualEps(f64),
    /// `[[x, −yε], [yε, x]]`.
    DualRot2 { x: f64, y: f64 },
    /// `(J_m(re^{iθ}), J_m(re^{iθ})ᵀ)` over ℂ ⊕ ℂ.
    JordanPair { m: usize, r: f64, theta: f64 },
    /// `([I_m 0], [0 I_m])`, shape `m × (m+1)`.
    SingularPairRow(usize),
    /// `([0; I_m], [I_m; 0])`, shape `(m+1) × m`.
    SingularPairCol(usize),
    /// `(J_m(0), I_m)`.
    JordanZeroLeft(usize),
    /// `(I_m, J_m(0)ᵀ)`.
    JordanZeroRight(usize),
    /// `[0]`.
    ZeroScalar,
    /// The `1×0` matrix.
    EmptyRow,
    /// The `0×1` matrix.
    EmptyCol,
    /// `J_m(λ)` over ℂ.
    JordanBlock { m: usize, lambda: Complex64 },
    /// A connected signed graph in canonical (lexicographically least) form.
    GraphComponent(Vec<Vec<i64>>),
}

impl Block {
    /// Stable tag used for ordering and serialization.
    pub fn tag(&self) -> &'static str {
        match self {
            Block::PosScalar(_) => "PosScalar",
            Block::SignedScalar(_) => "SignedScalar",
            Block::DualScalar { .. } => "DualScalar",
            Block::DualEps(_) => "DualEps",
            Block::DualRot2 { .. } => "DualRot2",
            Block::JordanPair { .. } => "JordanPair",
            Block::SingularPairRow(_) => "SingularPairRow",
            Block::SingularPairCol(_) => "SingularPairCol",
            Block::JordanZeroLeft(_) => "JordanZeroLeft",
            Block::JordanZeroRight(_) => "JordanZeroRight",
            Block::ZeroScalar => "ZeroScalar",
            Block::EmptyRow => "EmptyRow",
            Block::EmptyCol => "EmptyCol",
            Block::JordanBlock { .. } => "JordanBlock",
            Block::GraphComponent(_) => "GraphComponent",
        }
    }

    pub(crate) fn tag_index(&self) -> u8 {
        match self {
            Block::PosScalar(_) => 0,
            Block::SignedScalar(_) => 1,
            Block::DualScalar { .. } => 2,
            Block::DualEps(_) => 3,
            Block::DualRot2 { .. } => 4,
            Block::JordanPair { .. } => 5,
            Block::SingularPairRow(_) => 6,
            Block::SingularPairCol(_) => 7,
            Block::JordanZeroLeft(_) => 8,
            Block::JordanZeroRight(_) => 9,
            Block::ZeroScalar => 10,
            Block::EmptyRow => 11,
            Block::EmptyCol => 12,
            Block::JordanBlock { .. } => 13,
            Block::GraphComponent(_) => 14,
        }
    }

    /// The size parameter `m` (1 for scalars and empty blocks).
    pub fn size(&self) -> usize {
        match self {
            Block::DualRot2 { .. } => 2,
            Block::JordanPair { m, .. } | Block::JordanBlock { m, .. } => *m,
            Block::SingularPairRow(m)
            | Block::SingularPairCol(m)
            | Block::JordanZeroLeft(m)
            | Block::JordanZeroRight(m) => *m,
            Block::GraphComponent(g) => g.len(),
            _ => 1,
        }
    }

    /// Shape `(rows, cols)` of the materialized block.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Block::EmptyRow => (1, 0),
            Block::EmptyCol => (0, 1),
            Block::SingularPairRow(m) => (*m, m + 1),
            Block::SingularPairCol(m) => (m + 1, *m),
            b => (b.size(), b.size()),
        }
    }

    /// Real parameters in a fixed order.
    pub fn params(&self) -> Vec<f64> {
        match self {
            Block::PosScalar(x) | Block::SignedScalar(x) => vec![*x],
            Block::DualScalar { x, y } | Block::DualRot2 { x, y } => vec![*x, *y],
            Block::DualEps(y) => vec![*y],
            Block::JordanPair { r, theta, .. } => vec![*r, *theta],
            Block::JordanBlock { lambda, .. } => vec![lambda.re, lambda.im],
            Block::GraphComponent(g) => g.iter().flatten().map(|&v| v as f64).collect(),
            _ => Vec::new(),
        }
    }

    /// Parameter distance between blocks of the same tag and size; infinite
    /// otherwise.
    pub fn distance(&self, other: &Block) -> f64 {
        if self.tag_index() != other.tag_index() || self.size() != other.size() {
            return f64::INFINITY;
        }
        match (self, other) {
            (Block::JordanPair { r: r1, theta: t1, .. }, Block::JordanPair { r: r2, theta: t2, .. }) => {
                (Complex64::from_polar(*r1, *t1) - Complex64::from_polar(*r2, *t2)).norm()
            }
            (Block::GraphComponent(a), Block::GraphComponent(b)) => {
                if a == b {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            _ => self
                .params()
                .iter()
                .zip(other.params())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        }
    }

    /// Deterministic total order: tag, size, then parameters.
    pub fn canonical_cmp(&self, other: &Block) -> Ordering {
        self.tag_index()
            .cmp(&other.tag_index())
            .then(self.size().cmp(&other.size()))
            .then_with(|| {
                let (a, b) = (self.params(), other.params());
                for (x, y) in a.iter().zip(&b) {
                    match x.total_cmp(y) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                a.len().cmp(&b.len())
            })
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::PosScalar(x) | Block::SignedScalar(x) => write!(f, "{}({x})", self.tag()),
            Block::DualScalar { x, y } | Block::DualRot2 { x, y } => write!(f, "{}(x={x}, y={y})", self.tag()),
            Block::DualEps(y) => write!(f, "DualEps({y})"),
            Block::JordanPair { m, r, theta } => write!(f, "JordanPair(m={m}, r={r}, θ={theta})"),
            Block::SingularPairRow(m)
            | Block::SingularPairCol(m)
            | Block::JordanZeroLeft(m)
            | Block::JordanZeroRight(m) => write!(f, "{}({m})", self.tag()),
            Block::JordanBlock { m, lambda } => write!(f, "JordanBlock(m={m}, λ={lambda})"),
            Block::GraphComponent(g) => write!(f, "GraphComponent({g:?})"),
            _ => f.write_str(self.tag()),
        }
    }
}

/// Finite multiset of blocks, always stored in canonical order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlockMultiset {
    items: Vec<Block>,
}

impl BlockMultiset {
    pub fn new(mut items: Vec<Block>) -> Self {
        items.sort_by(Block::canonical_cmp);
        BlockMultiset { items }
    }

    pub fn items(&self) -> &[Block] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Block> {
        self.items.iter()
    }

    /// Multiset union `⊎`.
    pub fn union(&self, other: &BlockMultiset) -> BlockMultiset {
        BlockMultiset::new(self.items.iter().chain(&other.items).cloned().collect())
    }
}

impl FromIterator<Block> for BlockMultiset {
    fn from_iter<I: IntoIterator<Item = Block>>(iter: I) -> Self {
        BlockMultiset::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a BlockMultiset {
    type Item = &'a Block;
    type IntoIter = std::slice::Iter<'a, Block>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// `J_m(λ)` with `λ` on the diagonal and ones above it.
pub fn jordan_entries(m: usize, lambda: Complex64) -> Vec<Vec<Complex64>> {
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| match j {
                    _ if j == i => lambda,
                    _ if j == i + 1 => Complex64::new(1.0, 0.0),
                    _ => Complex64::new(0.0, 0.0),
                })
                .collect()
        })
        .collect()
}

fn shape_error(b: &Block, ring: RingId) -> Error {
    Error::ShapeMismatch(format!("block {b} has no materialization over {ring}"))
}

fn dual_scalar(ring: RingId, x: f64, y: f64) -> Option<Scalar> {
    match ring {
        RingId::DualTrivial => Some(Scalar::DualTrivial(Dual::new(x, y))),
        RingId::DualConj => Some(Scalar::DualConj(Dual::new(x, y))),
        _ => None,
    }
}

fn pair_matrix(a: Vec<Vec<Complex64>>, c: Vec<Vec<Complex64>>, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(RingId::DoubleComplexSwap, rows, cols, |i, j| Scalar::DoubleComplex(a[i][j], c[i][j]))
}

fn c64_grid(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Vec<Vec<Complex64>> {
    (0..rows)
        .map(|i| (0..cols).map(|j| Complex64::new(if f(i, j) { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

fn transpose_grid(g: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let rows = g.len();
    let cols = g.first().map_or(0, |r| r.len());
    (0..cols).map(|j| (0..rows).map(|i| g[i][j]).collect()).collect()
}

/// Materializes a block as a matrix over `ring`.
pub fn to_matrix(b: &Block, ring: RingId) -> Result<Matrix> {
    let err = || shape_error(b, ring);
    let classical_scalar = matches!(
        ring,
        RingId::Real | RingId::Complex | RingId::Quaternion | RingId::DualTrivial | RingId::DualConj
    );
    match b {
        Block::EmptyRow => Ok(Matrix::zeros(ring, 1, 0)),
        Block::EmptyCol => Ok(Matrix::zeros(ring, 0, 1)),
        Block::ZeroScalar => Ok(Matrix::zeros(ring, 1, 1)),
        Block::PosScalar(x) | Block::SignedScalar(x) if classical_scalar => {
            Ok(Matrix::from_fn(ring, 1, 1, |_, _| Scalar::from_real(ring, *x)))
        }
        Block::DualScalar { x, y } => {
            let s = dual_scalar(ring, *x, *y).ok_or_else(err)?;
            Ok(Matrix::from_fn(ring, 1, 1, |_, _| s))
        }
        Block::DualEps(y) => {
            let s = dual_scalar(ring, 0.0, *y).ok_or_else(err)?;
            Ok(Matrix::from_fn(ring, 1, 1, |_, _| s))
        }
        Block::DualRot2 { x, y } => {
            let d = |a, b| dual_scalar(ring, a, b).ok_or_else(err);
            let (diag, up, down) = (d(*x, 0.0)?, d(0.0, -*y)?, d(0.0, *y)?);
            Ok(Matrix::from_fn(ring, 2, 2, |i, j| match (i, j) {
                (0, 1) => up,
                (1, 0) => down,
                _ => diag,
            }))
        }
        Block::JordanPair { m, r, theta } if ring == RingId::DoubleComplexSwap => {
            let j = jordan_entries(*m, Complex64::from_polar(*r, *theta));
            let jt = transpose_grid(&j);
            Ok(pair_matrix(j, jt, *m, *m))
        }
        Block::SingularPairRow(m) if ring == RingId::DoubleComplexSwap => {
            let m = *m;
            Ok(pair_matrix(c64_grid(m, m + 1, |i, j| j == i), c64_grid(m, m + 1, |i, j| j == i + 1), m, m + 1))
        }
        Block::SingularPairCol(m) if ring == RingId::DoubleComplexSwap => {
            let m = *m;
            Ok(pair_matrix(c64_grid(m + 1, m, |i, j| i == j + 1), c64_grid(m + 1, m, |i, j| i == j), m + 1, m))
        }
        Block::JordanZeroLeft(m) if ring == RingId::DoubleComplexSwap => {
            let m = *m;
            Ok(pair_matrix(c64_grid(m, m, |i, j| j == i + 1), c64_grid(m, m, |i, j| i == j), m, m))
        }
        Block::JordanZeroRight(m) if ring == RingId::DoubleComplexSwap => {
            let m = *m;
            Ok(pair_matrix(c64_grid(m, m, |i, j| i == j), c64_grid(m, m, |i, j| i == j + 1), m, m))
        }
        Block::JordanBlock { m, lambda } if ring == RingId::Complex => {
            let j = jordan_entries(*m, *lambda);
            Ok(Matrix::from_fn(ring, *m, *m, |r, c| Scalar::Complex(j[r][c])))
        }
        Block::GraphComponent(g) if ring == RingId::IntegerTrivial => {
            let n = g.len();
            Ok(Matrix::from_fn(ring, n, n, |i, j| Scalar::Integer(g[i][j])))
        }
        _ => Err(err()),
    }
}

/// Direct sum of the materialized blocks in stored order.
pub fn materialize(blocks: &BlockMultiset, ring: RingId) -> Result<Matrix> {
    let parts = blocks.iter().map(|b| to_matrix(b, ring)).collect::<Result<Vec<_>>>()?;
    Matrix::direct_sum_all(ring, parts.iter())
}

fn unsupported(ring: RingId, kind: DecompKind) -> Error {
    Error::UnsupportedRingKind { ring, kind }
}

/// Checks that `(ring, kind)` is in scope.
pub fn check_supported(ring: RingId, kind: DecompKind) -> Result<()> {
    let ok = match kind {
        DecompKind::Jordan => ring == RingId::Complex,
        DecompKind::Svd => ring != RingId::IntegerTrivial,
        DecompKind::Spectral => true,
    };
    if ok {
        Ok(())
    } else {
        Err(unsupported(ring, kind))
    }
}

/// Membership in the generator set of `(ring, kind)`.
pub fn is_generator(b: &Block, ring: RingId, kind: DecompKind) -> Result<bool> {
    use Block::*;
    check_supported(ring, kind)?;
    let empty = matches!(b, EmptyRow | EmptyCol);
    let svd = kind == DecompKind::Svd;
    Ok(match ring {
        RingId::Zero => {
            if svd {
                empty
            } else {
                matches!(b, ZeroScalar)
            }
        }
        RingId::Real | RingId::Complex | RingId::Quaternion => match b {
            PosScalar(x) => svd && *x > 0.0,
            SignedScalar(x) => !svd && *x != 0.0,
            ZeroScalar => !svd,
            _ => svd && empty,
        },
        RingId::DualTrivial => match b {
            DualScalar { x, .. } => {
                if svd {
                    *x > 0.0
                } else {
                    *x != 0.0
                }
            }
            DualEps(y) => {
                if svd {
                    *y > 0.0
                } else {
                    *y != 0.0
                }
            }
            ZeroScalar => !svd,
            _ => svd && empty,
        },
        RingId::DualConj => match b {
            PosScalar(x) => svd && *x > 0.0,
            SignedScalar(x) => !svd && *x != 0.0,
            DualRot2 { x, y } => *y > 0.0 && (!svd || *x > 0.0),
            DualEps(y) => svd && *y > 0.0,
            ZeroScalar => !svd,
            _ => svd && empty,
        },
        RingId::DoubleComplexSwap => match b {
            JordanPair { m, r, theta } => {
                let bound = if svd { PI } else { 2.0 * PI };
                *m >= 1
                    && (0.0..bound).contains(theta)
                    && if svd { *r > 0.0 } else { *r >= 0.0 && (*r > 0.0 || *theta == 0.0) }
            }
            SingularPairRow(m) | SingularPairCol(m) | JordanZeroLeft(m) | JordanZeroRight(m) => svd && *m >= 1,
            _ => svd && empty,
        },
        RingId::IntegerTrivial => match b {
            GraphComponent(g) => is_canonical_graph(g),
            _ => false,
        },
    } || (kind == DecompKind::Jordan && matches!(b, JordanBlock { m, .. } if *m >= 1)))
}

fn is_canonical_graph(g: &[Vec<i64>]) -> bool {
    let n = g.len();
    if n == 0 || g.iter().any(|r| r.len() != n) {
        return false;
    }
    let symmetric = (0..n).all(|i| (0..n).all(|j| g[i][j] == g[j][i]));
    symmetric
        && crate::decomp::integer::is_connected(g)
        && (n > crate::decomp::integer::DEFAULT_SIZE_CAP
            || crate::decomp::integer::canonical_component(g).0 == g)
}

/// Angles this close to the wrap point are treated as the wrap point.
const ANGLE_SNAP: f64 = 1e-9;

/// Reduces `theta` into `[0, period)`, snapping values next to the period to 0.
pub fn reduce_angle(theta: f64, period: f64) -> f64 {
    let t = theta.rem_euclid(period);
    if t > period - ANGLE_SNAP || t < ANGLE_SNAP {
        0.0
    } else {
        t
    }
}

/// The generator representative of the class of `b`.
///
/// Over ℂ ⊕ ℂ the angle is reduced modulo π for SVD (where only `λ²` is an
/// invariant) and modulo 2π for the spectral kind (where `J_m(λ)` and
/// `J_m(−λ)` are not similar).
pub fn normalize_block(b: &Block, ring: RingId, kind: DecompKind) -> Result<Block> {
    use Block::*;
    check_supported(ring, kind)?;
    let svd = kind == DecompKind::Svd;
    let out = match (b, ring) {
        (SignedScalar(x) | PosScalar(x), _) if svd && ring != RingId::DualTrivial => {
            PosScalar(x.abs())
        }
        (SignedScalar(x) | PosScalar(x), _) if !svd && *x == 0.0 => ZeroScalar,
        (PosScalar(x), _) if !svd => SignedScalar(*x),
        (DualScalar { x, y }, RingId::DualTrivial) if svd && *x < 0.0 => DualScalar { x: -x, y: -y },
        (DualScalar { x, y }, _) if *x == 0.0 => {
            if svd {
                DualEps(y.abs())
            } else if *y == 0.0 {
                ZeroScalar
            } else {
                DualEps(*y)
            }
        }
        (DualScalar { x, .. }, RingId::DualConj) => {
            if svd {
                PosScalar(x.abs())
            } else {
                SignedScalar(*x)
            }
        }
        (DualEps(y), _) if svd || ring == RingId::DualConj => DualEps(y.abs()),
        (DualRot2 { x, y }, RingId::DualConj) => {
            let x = if svd { x.abs() } else { *x };
            DualRot2 { x, y: y.abs() }
        }
        (JordanPair { m, r, theta }, RingId::DoubleComplexSwap) => {
            let period = if svd { PI } else { 2.0 * PI };
            let (r, theta) = if *r < 0.0 { (-r, theta + PI) } else { (*r, *theta) };
            let theta = if r == 0.0 { 0.0 } else { reduce_angle(theta, period) };
            JordanPair { m: *m, r, theta }
        }
        _ => b.clone(),
    };
    if is_generator(&out, ring, kind)? {
        Ok(out)
    } else {
        Err(Error::NotEquivalentToGenerator)
    }
}

/// True iff there is a bijection between the multisets pairing blocks of
/// equal tag and size with parameter distance at most `tol`.
pub fn multiset_eq(a: &BlockMultiset, b: &BlockMultiset, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (x, y) = (a.items(), b.items());
    let n = x.len();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| x[i].distance(&y[j]) <= tol).collect()).collect();
    let mut matched: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, &adj, &mut matched, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(i: usize, adj: &[Vec<usize>], matched: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if matched[j].map_or(true, |k| augment(k, adj, matched, seen)) {
            matched[j] = Some(i);
            return true;
        }
    }
    false
}

/// Largest distance under the best matching, or `None` when no bijection of
/// tags and sizes exists. Used to report parameter drift.
pub fn multiset_drift(a: &BlockMultiset, b: &BlockMultiset) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut ds: Vec<f64> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| x.distance(y)))
        .filter(|d| d.is_finite())
        .collect();
    ds.push(0.0);
    ds.sort_by(f64::total_cmp);
    ds.dedup();
    // smallest threshold admitting a perfect matching
    let (mut lo, mut hi) = (0, ds.len() - 1);
    if !multiset_eq(a, b, ds[hi]) {
        return None;
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if multiset_eq(a, b, ds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(ds[lo])
}
