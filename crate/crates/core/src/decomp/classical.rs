//! ℝ, ℂ and ℍ through the Jacobi engines, and the zero ring.

use super::{assemble, Factorization, Options, Placement};
use crate::canonical::{Block, DecompKind};
use crate::engines::jacobi;
use crate::engines::{from_dense, to_dense, RingElem};
use crate::error::Result;
use crate::matrices::Matrix;

/// Singular values above `max(m,n)·rank_tol·σ_max` count as nonzero.
pub(crate) fn svd_rank(sigma: &[f64], dim: usize, opts: &Options) -> usize {
    jacobi::rank_from_sigma(sigma, dim, opts.rank_tol, 0.0)
}

pub fn svd<T: RingElem>(m: &Matrix, opts: &Options) -> Result<Factorization> {
    let a = to_dense::<T>(m)?;
    let (rows, cols) = (a.rows, a.cols);
    let (u, sigma, v) = jacobi::svd(&a);
    let r = svd_rank(&sigma, rows.max(cols), opts);
    let mut placements: Vec<Placement> =
        (0..r).map(|k| Placement::new(Block::PosScalar(sigma[k]), vec![k], vec![k])).collect();
    placements.extend(empty_placements(r, rows, cols));
    assemble(m, DecompKind::Svd, from_dense(&u), from_dense(&v), placements)
}

/// `EmptyRow` for each unused left column and `EmptyCol` for each unused
/// right column beyond index `from`.
pub(crate) fn empty_placements(from: usize, rows: usize, cols: usize) -> Vec<Placement> {
    (from..rows)
        .map(|i| Placement::new(Block::EmptyRow, vec![i], vec![]))
        .chain((from..cols).map(|j| Placement::new(Block::EmptyCol, vec![], vec![j])))
        .collect()
}

pub fn spectral<T: RingElem>(m: &Matrix, opts: &Options) -> Result<Factorization> {
    let a = to_dense::<T>(m)?.hermitian_part();
    let n = a.rows;
    let (values, q) = jacobi::hermitian_eig(&a);
    let top = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let zero = n as f64 * opts.rank_tol * top;
    let placements = values
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let b = if x.abs() <= zero { Block::ZeroScalar } else { Block::SignedScalar(x) };
            Placement::diag(b, vec![k])
        })
        .collect();
    let q = from_dense(&q);
    assemble(m, DecompKind::Spectral, q.clone(), q, placements)
}

/// Over the zero ring every matrix is the zero matrix, so only its shape
/// matters.
pub fn zero_ring(m: &Matrix, kind: DecompKind) -> Result<Factorization> {
    let (rows, cols) = m.shape();
    let left = Matrix::identity(m.ring(), rows);
    let right = Matrix::identity(m.ring(), cols);
    let placements = match kind {
        DecompKind::Spectral => (0..rows).map(|k| Placement::diag(Block::ZeroScalar, vec![k])).collect(),
        _ => empty_placements(0, rows, cols),
    };
    assemble(m, kind, left, right, placements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{multiset_eq, BlockMultiset};
    use crate::scalars::{Quaternion, RingId, Scalar};

    #[test]
    fn real_spectral_example() {
        let m = Matrix::from_reals(RingId::Real, 2, 2, &[5.0, 4.0, 4.0, 5.0]);
        let f = spectral::<f64>(&m, &Options::default()).unwrap();
        let want = BlockMultiset::new(vec![Block::SignedScalar(9.0), Block::SignedScalar(1.0)]);
        assert!(multiset_eq(&f.blocks, &want, 1e-12));
        assert!(f.residual < 1e-14);
    }

    #[test]
    fn negative_definite_keeps_sign() {
        let m = Matrix::from_reals(RingId::Complex, 1, 1, &[-2.0]);
        let f = spectral::<num_complex::Complex64>(&m, &Options::default()).unwrap();
        assert_eq!(f.blocks.items(), &[Block::SignedScalar(-2.0)]);
    }

    #[test]
    fn rank_deficient_square() {
        let m = Matrix::from_reals(RingId::Real, 2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let f = svd::<f64>(&m, &Options::default()).unwrap();
        assert_eq!(f.blocks.len(), 3);
        assert!(matches!(f.blocks.items()[0], Block::PosScalar(x) if (x - 2.0).abs() < 1e-12));
        assert!(f.residual < 1e-14);
    }

    #[test]
    fn quaternion_round_trip() {
        let q = |w, x, y, z| Scalar::Quaternion(Quaternion::new(w, x, y, z));
        let m = Matrix::from_fn(RingId::Quaternion, 3, 2, |i, j| q(i as f64, 0.5, j as f64 - 1.0, 0.25 * i as f64));
        let f = svd::<Quaternion>(&m, &Options::default()).unwrap();
        assert!(f.residual < 1e-12);
        assert!(f.left.is_unitary(1e-10) && f.right.is_unitary(1e-10));
    }

    #[test]
    fn zero_ring_shapes() {
        let m = Matrix::zeros(RingId::Zero, 2, 3);
        let f = zero_ring(&m, DecompKind::Svd).unwrap();
        assert_eq!(f.blocks.len(), 5);
    }
}
