//! Numeric engines over ℝ, ℂ and ℍ that every ring-specific driver reduces
//! to, plus conversions between ring [`Matrix`] values and dense numeric
//! arrays.

pub mod antisym;
pub mod cluster;
pub mod dense;
pub mod jacobi;
pub mod jordan;

use num_complex::Complex64;

pub use cluster::{cluster, cluster_real, Cluster};
pub use dense::{DMat, Elem};

use crate::error::{Error, Result};
use crate::matrices::Matrix;
use crate::scalars::{Dual, Quaternion, RingId, Scalar};

/// Self-adjointness tolerance used by the Matrix-level entry points.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Eigen-decomposition `A = Q diag(values) Q*` with `values` descending.
#[derive(Debug, Clone)]
pub struct EigResult {
    pub vectors: Matrix,
    pub values: Vec<f64>,
}

/// Jordan data over ℂ with `transform⁻¹ · A · transform = ⊕ J_s(λ)`.
#[derive(Debug, Clone)]
pub struct JordanForm {
    /// `(eigenvalue, block sizes descending)` per cluster.
    pub clusters: Vec<(Complex64, Vec<usize>)>,
    pub transform: Matrix,
    pub inverse: Matrix,
}

/// Element types that are the scalars of a classical ring.
pub trait RingElem: Elem {
    const RING: RingId;
    fn from_scalar(s: &Scalar) -> Option<Self>;
    fn into_scalar(self) -> Scalar;
}

impl RingElem for f64 {
    const RING: RingId = RingId::Real;
    fn from_scalar(s: &Scalar) -> Option<Self> {
        match *s {
            Scalar::Real(x) => Some(x),
            Scalar::Integer(n) => Some(n as f64),
            Scalar::Zero => Some(0.0),
            _ => None,
        }
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Real(self)
    }
}

impl RingElem for Complex64 {
    const RING: RingId = RingId::Complex;
    fn from_scalar(s: &Scalar) -> Option<Self> {
        match *s {
            Scalar::Complex(z) => Some(z),
            Scalar::Real(x) => Some(Complex64::new(x, 0.0)),
            _ => None,
        }
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Complex(self)
    }
}

impl RingElem for Quaternion {
    const RING: RingId = RingId::Quaternion;
    fn from_scalar(s: &Scalar) -> Option<Self> {
        match *s {
            Scalar::Quaternion(q) => Some(q),
            Scalar::Real(x) => Some(Quaternion::new(x, 0.0, 0.0, 0.0)),
            _ => None,
        }
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Quaternion(self)
    }
}

/// Dense copy of a classical-ring matrix.
pub fn to_dense<T: RingElem>(m: &Matrix) -> Result<DMat<T>> {
    let mut out = DMat::<T>::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(i, j)] = T::from_scalar(&m.get(i, j)).ok_or(Error::RingMismatch(T::RING, m.ring()))?;
        }
    }
    Ok(out)
}

pub fn from_dense<T: RingElem>(d: &DMat<T>) -> Matrix {
    Matrix::from_fn(T::RING, d.rows, d.cols, |i, j| d[(i, j)].into_scalar())
}

/// `(M₀, M₁)` with `M = M₀ + εM₁` for either dual ring.
pub fn dual_parts(m: &Matrix) -> Result<(DMat<f64>, DMat<f64>)> {
    let mut re = DMat::<f64>::zeros(m.rows(), m.cols());
    let mut eps = DMat::<f64>::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            match m.get(i, j) {
                Scalar::DualTrivial(d) | Scalar::DualConj(d) => {
                    re[(i, j)] = d.re;
                    eps[(i, j)] = d.eps;
                }
                other => return Err(Error::RingMismatch(RingId::DualTrivial, other.ring())),
            }
        }
    }
    Ok((re, eps))
}

pub fn from_dual_parts(ring: RingId, re: &DMat<f64>, eps: &DMat<f64>) -> Matrix {
    Matrix::from_fn(ring, re.rows, re.cols, |i, j| {
        let d = Dual::new(re[(i, j)], eps[(i, j)]);
        match ring {
            RingId::DualTrivial => Scalar::DualTrivial(d),
            RingId::DualConj => Scalar::DualConj(d),
            _ => panic!("from_dual_parts: {ring} is not a dual ring"),
        }
    })
}

/// `(A, C)` for a matrix over ℂ ⊕ ℂ.
pub fn pair_parts(m: &Matrix) -> Result<(DMat<Complex64>, DMat<Complex64>)> {
    let mut a = DMat::zeros(m.rows(), m.cols());
    let mut c = DMat::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            match m.get(i, j) {
                Scalar::DoubleComplex(x, y) => {
                    a[(i, j)] = x;
                    c[(i, j)] = y;
                }
                other => return Err(Error::RingMismatch(RingId::DoubleComplexSwap, other.ring())),
            }
        }
    }
    Ok((a, c))
}

pub fn from_pair_parts(a: &DMat<Complex64>, c: &DMat<Complex64>) -> Matrix {
    Matrix::from_fn(RingId::DoubleComplexSwap, a.rows, a.cols, |i, j| Scalar::DoubleComplex(a[(i, j)], c[(i, j)]))
}

fn self_adjoint_check(m: &Matrix, err: Error) -> Result<()> {
    if m.is_hermitian(SYMMETRY_TOL * (1.0 + m.max_norm())) {
        Ok(())
    } else {
        Err(err)
    }
}

fn eig_generic<T: RingElem>(a: &Matrix, err: Error) -> Result<EigResult> {
    if a.ring() != T::RING {
        return Err(Error::RingMismatch(T::RING, a.ring()));
    }
    self_adjoint_check(a, err)?;
    let (values, q) = jacobi::hermitian_eig(&to_dense::<T>(a)?);
    Ok(EigResult { vectors: from_dense(&q), values })
}

/// Real symmetric eigensolver.
pub fn symmetric_eig(a: &Matrix) -> Result<EigResult> {
    eig_generic::<f64>(a, Error::NotSymmetric)
}

/// Complex Hermitian eigensolver.
pub fn hermitian_eig(a: &Matrix) -> Result<EigResult> {
    eig_generic::<Complex64>(a, Error::NotHermitian)
}

/// Quaternion Hermitian eigensolver.
pub fn quaternion_eig(a: &Matrix) -> Result<EigResult> {
    eig_generic::<Quaternion>(a, Error::NotHermitian)
}

/// Real SVD `A = U diag(σ) Vᵀ`; `U` is `m×m`, `V` is `n×n`.
pub fn real_svd(a: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    if a.ring() != RingId::Real {
        return Err(Error::RingMismatch(RingId::Real, a.ring()));
    }
    let (u, s, v) = jacobi::svd(&to_dense::<f64>(a)?);
    Ok((from_dense(&u), s, from_dense(&v)))
}

/// Real antisymmetric canonical form: `(Q, rates, zero count)`.
pub fn antisymmetric_canonical(a: &Matrix) -> Result<(Matrix, Vec<f64>, usize)> {
    if a.ring() != RingId::Real {
        return Err(Error::RingMismatch(RingId::Real, a.ring()));
    }
    let d = to_dense::<f64>(a)?;
    if !d.is_square() || d.add(&d.transpose()).max_abs() > SYMMETRY_TOL * (1.0 + d.max_abs()) {
        return Err(Error::NotAntisymmetric);
    }
    let scale = d.max_abs().max(1.0);
    let c = antisym::antisymmetric_canonical(&d, 1e-10 * scale * d.rows as f64, 1e-6 * scale);
    Ok((from_dense(&c.q), c.pairs, c.zeros))
}

/// Numeric Jordan structure of a square complex matrix.
pub fn complex_jordan(a: &Matrix, cluster_tol: f64) -> Result<JordanForm> {
    if a.ring() != RingId::Complex {
        return Err(Error::RingMismatch(RingId::Complex, a.ring()));
    }
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!("Jordan form of a {}x{} matrix", a.rows(), a.cols())));
    }
    let js = jordan::complex_jordan(&to_dense::<Complex64>(a)?, cluster_tol)?;
    Ok(JordanForm {
        clusters: js.clusters.iter().map(|c| (c.eigenvalue, c.segre.clone())).collect(),
        transform: from_dense(&js.transform),
        inverse: from_dense(&js.inverse),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrappers_check_preconditions() {
        let a = Matrix::from_reals(RingId::Real, 2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert_eq!(symmetric_eig(&a).unwrap_err(), Error::NotSymmetric);
        assert_eq!(antisymmetric_canonical(&a).unwrap_err(), Error::NotAntisymmetric);
        let z = Matrix::from_reals(RingId::Complex, 2, 2, &[2.0, 0.0, 0.0, 3.0]);
        assert_eq!(hermitian_eig(&z).unwrap().values, vec![3.0, 2.0]);
        assert!(matches!(real_svd(&z), Err(Error::RingMismatch(..))));
    }

    #[test]
    fn jordan_wrapper_roundtrip() {
        let a = Matrix::from_reals(RingId::Complex, 3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let jf = complex_jordan(&a, 1e-6).unwrap();
        assert_eq!(jf.clusters.len(), 1);
        assert_eq!(jf.clusters[0].1, vec![2, 1]);
        let prod = jf.transform.matmul(&jf.inverse).unwrap();
        assert!(prod.max_diff(&Matrix::identity(RingId::Complex, 3)).unwrap() < 1e-10);
    }
}
