//! Dense matrices over a single *-ring, including matrices with zero rows or
//! zero columns.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::{RingId, Scalar};

/// Row-major dense matrix. `rows == 0` or `cols == 0` is legal and carries no
/// entries; two such matrices are equal iff their shapes are.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    ring: RingId,
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn new(ring: RingId, rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|s| s.ring() != ring) {
            return Err(Error::RingMismatch(ring, bad.ring()));
        }
        Ok(Matrix { ring, rows, cols, entries })
    }

    pub fn from_fn(ring: RingId, rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let s = f(i, j);
                debug_assert_eq!(s.ring(), ring);
                entries.push(s);
            }
        }
        Matrix { ring, rows, cols, entries }
    }

    pub fn zeros(ring: RingId, rows: usize, cols: usize) -> Matrix {
        let z = Scalar::zero(ring);
        Matrix { ring, rows, cols, entries: vec![z; rows * cols] }
    }

    pub fn identity(ring: RingId, n: usize) -> Matrix {
        let (z, o) = (Scalar::zero(ring), Scalar::one(ring));
        Matrix::from_fn(ring, n, n, |i, j| if i == j { o } else { z })
    }

    /// Builds a real-valued matrix lifted into `ring`.
    pub fn from_reals(ring: RingId, rows: usize, cols: usize, values: &[f64]) -> Matrix {
        assert_eq!(values.len(), rows * cols);
        Matrix::from_fn(ring, rows, cols, |i, j| Scalar::from_real(ring, values[i * cols + j]))
    }

    pub fn ring(&self) -> RingId {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        assert_eq!(s.ring(), self.ring, "scalar ring does not match matrix ring");
        self.entries[i * self.cols + j] = s;
    }

    /// `(M*)_{ij} = (M_{ji})*`.
    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let zero = Scalar::zero(self.ring);
        Ok(Matrix::from_fn(self.ring, self.rows, other.cols, |i, j| {
            (0..self.cols).fold(zero, |acc, k| acc + self.get(i, k) * other.get(k, j))
        }))
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Matrix, f: impl Fn(Scalar, Scalar) -> Scalar) -> Result<Matrix> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(*a, *b)).collect();
        Ok(Matrix { ring: self.ring, rows: self.rows, cols: self.cols, entries })
    }

    pub fn map(&self, f: impl Fn(Scalar) -> Scalar) -> Matrix {
        Matrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|s| f(*s)).collect(),
        }
    }

    /// Block-diagonal direct sum `A ⊕ B`.
    pub fn direct_sum(&self, other: &Matrix) -> Result<Matrix> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        let (r, c) = (self.rows, self.cols);
        let zero = Scalar::zero(self.ring);
        Ok(Matrix::from_fn(self.ring, r + other.rows, c + other.cols, |i, j| {
            match (i < r, j < c) {
                (true, true) => self.get(i, j),
                (false, false) => other.get(i - r, j - c),
                _ => zero,
            }
        }))
    }

    /// Direct sum of a sequence; the empty sum is the 0×0 matrix.
    pub fn direct_sum_all<'a>(ring: RingId, parts: impl IntoIterator<Item = &'a Matrix>) -> Result<Matrix> {
        parts
            .into_iter()
            .try_fold(Matrix::zeros(ring, 0, 0), |acc, m| acc.direct_sum(m))
    }

    /// Max absolute component over all entries.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, s| m.max(s.max_abs()))
    }

    pub fn max_diff(&self, other: &Matrix) -> Result<f64> {
        Ok(self.sub(other)?.max_norm())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let id = Matrix::identity(self.ring, self.rows);
        let adj = self.adjoint();
        let (Ok(a), Ok(b)) = (self.matmul(&adj), adj.matmul(self)) else {
            return false;
        };
        a.max_diff(&id).map_or(false, |d| d <= tol) && b.max_diff(&id).map_or(false, |d| d <= tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_diff(&self.adjoint()).map_or(false, |d| d <= tol)
    }

    /// The self-adjoint bordered matrix `[[0, M*], [M, 0]]` of size
    /// `(cols + rows)`.
    pub fn bordered(&self) -> Matrix {
        let (m, n) = (self.rows, self.cols);
        let zero = Scalar::zero(self.ring);
        Matrix::from_fn(self.ring, n + m, n + m, |i, j| match (i < n, j < n) {
            (true, false) => self.get(j - n, i).conj(),
            (false, true) => self.get(i - n, j),
            _ => zero,
        })
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.ring, self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.ring, idx.len(), self.cols, |i, j| self.get(idx[i], j))
    }

    pub fn scale_real(&self, s: f64) -> Matrix {
        let f = Scalar::from_real(self.ring, s);
        self.map(|x| x * f)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}x{}", self.ring, self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{Dual, Quaternion};
    use num_complex::Complex64;

    fn real(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::from_reals(RingId::Real, rows, cols, v)
    }

    fn dual_conj(rows: usize, cols: usize, v: &[(f64, f64)]) -> Matrix {
        Matrix::from_fn(RingId::DualConj, rows, cols, |i, j| {
            let (a, b) = v[i * cols + j];
            Scalar::DualConj(Dual::new(a, b))
        })
    }

    #[test]
    fn adjoint_examples() {
        let m = dual_conj(1, 1, &[(0.0, 1.0)]);
        assert_eq!(m.adjoint(), dual_conj(1, 1, &[(0.0, -1.0)]));
        let e = Matrix::zeros(RingId::Complex, 0, 3);
        assert_eq!(e.adjoint().shape(), (3, 0));
        let c = |r: f64, i: f64| Complex64::new(r, i);
        let pair = Matrix::from_fn(RingId::DoubleComplexSwap, 2, 2, |i, j| {
            Scalar::DoubleComplex(c((i * 2 + j) as f64, 1.0), c(10.0 + (i * 2 + j) as f64, -1.0))
        });
        let adj = pair.adjoint();
        // (A, C)* = (Cᵀ, Aᵀ)
        for i in 0..2 {
            for j in 0..2 {
                let Scalar::DoubleComplex(a, cc) = pair.get(j, i) else { unreachable!() };
                assert_eq!(adj.get(i, j), Scalar::DoubleComplex(cc, a));
            }
        }
        assert_eq!(adj.adjoint(), pair);
    }

    #[test]
    fn matmul_examples() {
        let a = Matrix::zeros(RingId::Real, 2, 0);
        let b = Matrix::zeros(RingId::Real, 0, 3);
        assert_eq!(a.matmul(&b).unwrap(), Matrix::zeros(RingId::Real, 2, 3));
        let q = |w, x, y, z| Scalar::Quaternion(Quaternion::new(w, x, y, z));
        let i = Matrix::new(RingId::Quaternion, 1, 1, vec![q(0.0, 1.0, 0.0, 0.0)]).unwrap();
        let j = Matrix::new(RingId::Quaternion, 1, 1, vec![q(0.0, 0.0, 1.0, 0.0)]).unwrap();
        assert_eq!(i.matmul(&j).unwrap().get(0, 0), q(0.0, 0.0, 0.0, 1.0));
        let m = real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(Matrix::identity(RingId::Real, 2).matmul(&m).unwrap(), m);
        assert!(m.matmul(&real(3, 1, &[1.0, 1.0, 1.0])).is_err());
        assert!(m.matmul(&Matrix::identity(RingId::Complex, 2)).is_err());
    }

    #[test]
    fn direct_sum_padding() {
        let k = real(1, 1, &[3.0])
            .direct_sum(&real(1, 1, &[-1.0]))
            .unwrap()
            .direct_sum(&Matrix::zeros(RingId::Real, 0, 1))
            .unwrap();
        assert_eq!(k, real(2, 3, &[3.0, 0.0, 0.0, 0.0, -1.0, 0.0]));
        let a = real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(a.direct_sum(&Matrix::zeros(RingId::Real, 0, 0)).unwrap(), a);
        let z = Matrix::zeros(RingId::Real, 1, 0).direct_sum(&Matrix::zeros(RingId::Real, 0, 1)).unwrap();
        assert_eq!(z, real(1, 1, &[0.0]));
        let padded_row = a.direct_sum(&Matrix::zeros(RingId::Real, 1, 0)).unwrap();
        assert_eq!(padded_row, real(3, 2, &[1.0, 2.0, 3.0, 4.0, 0.0, 0.0]));
    }

    #[test]
    fn unitary_checks() {
        assert!(Matrix::identity(RingId::Complex, 3).is_unitary(1e-12));
        let sp = Matrix::new(
            RingId::IntegerTrivial,
            2,
            2,
            vec![Scalar::Integer(0), Scalar::Integer(-1), Scalar::Integer(1), Scalar::Integer(0)],
        )
        .unwrap();
        assert!(sp.is_unitary(0.0));
        // U = I + ε[[0,1],[−1,0]]: under the conjugate involution U U* = I + 2ε[[0,1],[−1,0]];
        // under the trivial one U Uᵀ = I + ε(K + Kᵀ) = I because K is antisymmetric.
        let vals = [(1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 0.0)];
        assert!(!dual_conj(2, 2, &vals).is_unitary(1e-9));
        let triv = Matrix::from_fn(RingId::DualTrivial, 2, 2, |i, j| {
            let (a, b) = vals[i * 2 + j];
            Scalar::DualTrivial(Dual::new(a, b))
        });
        assert!(triv.is_unitary(1e-12));
        assert!(!real(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).is_unitary(1e-9));
    }

    #[test]
    fn hermitian_checks() {
        assert!(dual_conj(2, 2, &[(1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (1.0, 0.0)]).is_hermitian(1e-12));
        assert!(!dual_conj(1, 1, &[(0.0, 1.0)]).is_hermitian(1e-12));
        let c = |r: f64, i: f64| Complex64::new(r, i);
        let a = [[c(1.0, 2.0), c(0.5, -1.0)], [c(3.0, 0.0), c(-2.0, 1.0)]];
        let m = Matrix::from_fn(RingId::DoubleComplexSwap, 2, 2, |i, j| Scalar::DoubleComplex(a[i][j], a[j][i]));
        assert!(m.is_hermitian(1e-12));
    }

    #[test]
    fn bordered_shapes() {
        let b = real(1, 1, &[2.5]).bordered();
        assert_eq!(b, real(2, 2, &[0.0, 2.5, 2.5, 0.0]));
        assert_eq!(Matrix::zeros(RingId::Real, 1, 0).bordered(), real(1, 1, &[0.0]));
        let m = dual_conj(1, 2, &[(1.0, 2.0), (0.0, 3.0)]);
        assert!(m.bordered().is_hermitian(0.0));
    }
}
