//! Similarity over ℂ: `A = P (⊕ J_m(λ)) P⁻¹`.

use num_complex::Complex64;

use super::{assemble, Factorization, Options, Placement};
use crate::canonical::{check_supported, Block, DecompKind};
use crate::engines::jordan::complex_jordan;
use crate::engines::{from_dense, to_dense};
use crate::error::{Error, Result};
use crate::matrices::Matrix;

pub fn jordan(m: &Matrix, opts: &Options) -> Result<Factorization> {
    check_supported(m.ring(), DecompKind::Jordan)?;
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("Jordan form of a {}x{} matrix", m.rows(), m.cols())));
    }
    let a = to_dense::<Complex64>(m)?;
    let js = complex_jordan(&a, opts.cluster_tol)?;
    let mut placements = Vec::new();
    let mut offset = 0;
    for cl in &js.clusters {
        for &s in &cl.segre {
            let block = Block::JordanBlock { m: s, lambda: cl.eigenvalue };
            placements.push(Placement::diag(block, (offset..offset + s).collect()));
            offset += s;
        }
    }
    assemble(m, DecompKind::Jordan, from_dense(&js.transform), from_dense(&js.inverse), placements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{multiset_eq, BlockMultiset};
    use crate::scalars::RingId;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn examples() {
        let opts = Options::default();
        let m = Matrix::from_reals(RingId::Complex, 2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let f = jordan(&m, &opts).unwrap();
        assert!(multiset_eq(&f.blocks, &BlockMultiset::new(vec![Block::JordanBlock { m: 2, lambda: c(0.0) }]), 1e-12));
        let m = Matrix::from_reals(RingId::Complex, 3, 3, &[3.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 5.0]);
        let f = jordan(&m, &opts).unwrap();
        let want = BlockMultiset::new(vec![
            Block::JordanBlock { m: 1, lambda: c(3.0) },
            Block::JordanBlock { m: 1, lambda: c(3.0) },
            Block::JordanBlock { m: 1, lambda: c(5.0) },
        ]);
        assert!(multiset_eq(&f.blocks, &want, 1e-12));
        assert!(f.residual < 1e-14);
    }

    #[test]
    fn real_ring_is_out_of_scope() {
        let m = Matrix::identity(RingId::Real, 2);
        assert!(matches!(jordan(&m, &Options::default()), Err(Error::UnsupportedRingKind { .. })));
    }
}
