//! Small dense matrices over ℝ, ℂ and ℍ used by the numeric engines.

use std::fmt::Debug;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::scalars::Quaternion;

/// Division-ring element with an involution and a real norm.
pub trait Elem:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    fn norm_sqr(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn re(self) -> f64;

    fn abs(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn inv(self) -> Self {
        self.conj().scale(1.0 / self.norm_sqr())
    }
}

impl Elem for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn re(self) -> f64 {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
}

impl Elem for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn re(self) -> f64 {
        self.re
    }
    fn abs(self) -> f64 {
        self.norm()
    }
}

impl Elem for Quaternion {
    fn zero() -> Self {
        Quaternion::default()
    }
    fn one() -> Self {
        Quaternion::new(1.0, 0.0, 0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Quaternion::new(x, 0.0, 0.0, 0.0)
    }
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }
    fn norm_sqr(self) -> f64 {
        Quaternion::norm_sqr(self)
    }
    fn scale(self, s: f64) -> Self {
        Quaternion::scale(self, s)
    }
    fn re(self) -> f64 {
        self.w
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DMat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Elem> DMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DMat { rows, cols, data }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[T]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        DMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| f(*x)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| x.scale(s))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)])
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        })
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        Self::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self[(i, j)],
                (false, false) => other[(i - self.rows, j - self.cols)],
                _ => T::zero(),
            }
        })
    }

    /// Hermitian part `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale(0.5)
    }

    /// `‖A*A − I‖_max`, columns orthonormal residual.
    pub fn orthonormality_residual(&self) -> f64 {
        self.adjoint().matmul(self).sub(&Self::identity(self.cols)).max_abs()
    }
}

impl<T> Index<(usize, usize)> for DMat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// `⟨x, y⟩ = Σ conj(x_k) y_k`.
pub fn inner<T: Elem>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (a, b)| acc + a.conj() * *b)
}

pub fn norm<T: Elem>(x: &[T]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `x ← x − u·c` (scalar acting on the right, as quaternion modules require).
pub fn axpy_right<T: Elem>(x: &mut [T], u: &[T], c: T) {
    for (xi, ui) in x.iter_mut().zip(u) {
        *xi = *xi - *ui * c;
    }
}

/// Projects `x` off an orthonormal family, twice for stability.
pub fn project_out<T: Elem>(x: &mut [T], basis: &[Vec<T>]) {
    for _ in 0..2 {
        for u in basis {
            let c = inner(u, x);
            axpy_right(x, u, c);
        }
    }
}

/// Greedy pivoted Gram–Schmidt: picks up to `count` vectors from
/// `candidates` that extend the orthonormal family `basis`, always taking the
/// candidate with the largest residual. Returns the chosen candidates'
/// indices and the orthonormalised vectors; stops early when the best
/// residual falls below `min_residual`.
pub fn pivoted_extend<T: Elem>(
    basis: &[Vec<T>],
    candidates: &[Vec<T>],
    count: usize,
    min_residual: f64,
) -> (Vec<usize>, Vec<Vec<T>>) {
    let mut family: Vec<Vec<T>> = basis.to_vec();
    let mut residuals: Vec<Vec<T>> = candidates
        .iter()
        .map(|c| {
            let mut r = c.clone();
            project_out(&mut r, &family);
            r
        })
        .collect();
    let mut used = vec![false; candidates.len()];
    let (mut picked, mut out) = (Vec::new(), Vec::new());
    while picked.len() < count {
        let best = (0..candidates.len())
            .filter(|&i| !used[i])
            .map(|i| (i, norm(&residuals[i])))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((i, nrm)) = best else { break };
        if nrm <= min_residual {
            break;
        }
        used[i] = true;
        let mut v = residuals[i].clone();
        project_out(&mut v, &family);
        let nv = norm(&v);
        if nv <= min_residual {
            continue;
        }
        let v: Vec<T> = v.iter().map(|x| x.scale(1.0 / nv)).collect();
        for r in residuals.iter_mut() {
            let c = inner(&v, r);
            axpy_right(r, &v, c);
        }
        family.push(v.clone());
        picked.push(i);
        out.push(v);
    }
    (picked, out)
}

/// Completes an orthonormal family of vectors in `T^dim` to a basis using
/// standard basis vectors.
pub fn complete_basis<T: Elem>(family: &[Vec<T>], dim: usize) -> Vec<Vec<T>> {
    let std_basis: Vec<Vec<T>> = (0..dim)
        .map(|i| (0..dim).map(|k| if k == i { T::one() } else { T::zero() }).collect())
        .collect();
    let need = dim - family.len();
    let (_, extra) = pivoted_extend(family, &std_basis, need, 1e-8);
    let mut all = family.to_vec();
    all.extend(extra);
    all
}

/// Orthonormalises columns (modified Gram–Schmidt). Panics on rank
/// deficiency; callers use it on full-rank random samples.
pub fn orthonormalize_columns<T: Elem>(m: &DMat<T>) -> DMat<T> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(m.cols);
    for j in 0..m.cols {
        let mut v = m.column(j);
        project_out(&mut v, &out);
        let n = norm(&v);
        assert!(n > 1e-12, "orthonormalize_columns: rank deficient input");
        out.push(v.iter().map(|x| x.scale(1.0 / n)).collect());
    }
    DMat::from_columns(m.rows, &out)
}

/// Inverse by Gauss–Jordan elimination with partial pivoting. Returns `None`
/// when a pivot falls below `1e-300`.
pub fn inverse<T: Elem>(a: &DMat<T>) -> Option<DMat<T>> {
    assert!(a.is_square());
    let n = a.rows;
    let mut m = a.clone();
    let mut inv = DMat::<T>::identity(n);
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[(x, col)].abs().total_cmp(&m[(y, col)].abs()))?;
        if m[(piv, col)].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(piv * n + j, col * n + j);
                inv.data.swap(piv * n + j, col * n + j);
            }
        }
        let p = m[(col, col)].inv();
        for j in 0..n {
            m[(col, j)] = p * m[(col, j)];
            inv[(col, j)] = p * inv[(col, j)];
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[(i, col)];
            if f == T::zero() {
                continue;
            }
            for j in 0..n {
                m[(i, j)] = m[(i, j)] - f * m[(col, j)];
                inv[(i, j)] = inv[(i, j)] - f * inv[(col, j)];
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip_quaternion() {
        let q = |w, x, y, z| Quaternion::new(w, x, y, z);
        let a = DMat::from_fn(2, 2, |i, j| {
            [[q(1.0, 2.0, 0.0, -1.0), q(0.0, 1.0, 1.0, 0.0)], [q(0.5, 0.0, 0.0, 3.0), q(2.0, 0.0, 1.0, 0.0)]][i][j]
        });
        let inv = inverse(&a).unwrap();
        assert!(a.matmul(&inv).sub(&DMat::identity(2)).max_abs() < 1e-12);
        assert!(inv.matmul(&a).sub(&DMat::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = DMat::from_fn(2, 2, |i, _| i as f64);
        assert!(inverse(&a).is_none());
    }

    #[test]
    fn completion_is_orthonormal() {
        let v = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), Complex64::new(0.0, 0.0)];
        let b = complete_basis(&[v], 3);
        let m = DMat::from_columns(3, &b);
        assert!(m.orthonormality_residual() < 1e-12);
    }
}
