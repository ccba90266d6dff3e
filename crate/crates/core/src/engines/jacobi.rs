//! Jacobi rotation methods over ℝ, ℂ and ℍ.
//!
//! Off-diagonal entries are first rotated onto the positive real axis by a
//! unit phase, after which an ordinary real Jacobi rotation applies. This
//! makes the same code work for the quaternions, where the phase must be
//! applied on the right of columns and on the left of rows.

use super::dense::{complete_basis, norm, DMat, Elem};

const MAX_SWEEPS: usize = 80;

/// Eigen-decomposition of a self-adjoint matrix: `A = Q diag(values) Q*`
/// with `values` descending.
pub fn hermitian_eig<T: Elem>(a: &DMat<T>) -> (Vec<f64>, DMat<T>) {
    assert!(a.is_square());
    let n = a.rows;
    let mut a = a.hermitian_part();
    let mut v = DMat::<T>::identity(n);
    let scale = a.frobenius();
    if n > 1 && scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate_pair(&mut a, &mut v, p, q, 1e-18 * scale);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re().total_cmp(&a[(i, i)].re()));
    let values = order.iter().map(|&i| a[(i, i)].re()).collect();
    (values, v.select_columns(&order))
}

/// One two-sided rotation zeroing `a[(p, q)]`. Entries at or below `tiny`
/// are left alone: their squared norms may be subnormal, which would make
/// the phase inexact and the accumulated `v` non-unitary.
fn rotate_pair<T: Elem>(a: &mut DMat<T>, v: &mut DMat<T>, p: usize, q: usize, tiny: f64) {
    let n = a.rows;
    let apq = a[(p, q)];
    let g = apq.abs();
    if g <= tiny || g < 1e-150 {
        return;
    }
    // A ← D* A D with D = diag(.., d, ..) at q, d = conj(apq/|apq|): makes a_pq real.
    let d = apq.scale(1.0 / g).conj();
    if (d - T::one()).abs() > 0.0 {
        for k in 0..n {
            a[(k, q)] = a[(k, q)] * d;
        }
        let dc = d.conj();
        for k in 0..n {
            a[(q, k)] = dc * a[(q, k)];
        }
        for k in 0..n {
            v[(k, q)] = v[(k, q)] * d;
        }
    }
    let app = a[(p, p)].re();
    let aqq = a[(q, q)].re();
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp.scale(c) - akq.scale(s);
        a[(k, q)] = akp.scale(s) + akq.scale(c);
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = apk.scale(c) - aqk.scale(s);
        a[(q, k)] = apk.scale(s) + aqk.scale(c);
    }
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp.scale(c) - vkq.scale(s);
        v[(k, q)] = vkp.scale(s) + vkq.scale(c);
    }
    a[(p, q)] = T::zero();
    a[(q, p)] = T::zero();
}

/// Full singular value decomposition `A = U Σ V*` by one-sided Jacobi.
/// `U` is `m×m`, `V` is `n×n`, and `sigma` has `min(m, n)` descending
/// entries. Columns of `U` belonging to singular values at or below
/// `max(m,n)·1e-14·σ_max` are completed to an orthonormal basis rather than
/// normalised.
pub fn svd<T: Elem>(a: &DMat<T>) -> (DMat<T>, Vec<f64>, DMat<T>) {
    let (m, n) = (a.rows, a.cols);
    let mut w = a.clone();
    let mut v = DMat::<T>::identity(n);
    // pairs coupled below this are already orthogonal to working precision
    let floor = 1e-30 * a.frobenius().powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, T::zero());
                for k in 0..m {
                    alpha += w[(k, p)].norm_sqr();
                    beta += w[(k, q)].norm_sqr();
                    gamma = gamma + w[(k, p)].conj() * w[(k, q)];
                }
                let g = gamma.abs();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() || g <= floor || g < 1e-300 {
                    continue;
                }
                rotated = true;
                let d = gamma.scale(1.0 / g).conj();
                for k in 0..m {
                    w[(k, q)] = w[(k, q)] * d;
                }
                for k in 0..n {
                    v[(k, q)] = v[(k, q)] * d;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let (wp, wq) = (w[(k, p)], w[(k, q)]);
                    w[(k, p)] = wp.scale(c) - wq.scale(s);
                    w[(k, q)] = wp.scale(s) + wq.scale(c);
                }
                for k in 0..n {
                    let (vp, vq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vp.scale(c) - vq.scale(s);
                    v[(k, q)] = vp.scale(s) + vq.scale(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| norm(&w.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let v = v.select_columns(&order);
    let k = m.min(n);
    let sigma: Vec<f64> = order.iter().take(k).map(|&j| norms[j]).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let cutoff = (m.max(n) as f64) * 1e-14 * smax;
    let mut ucols: Vec<Vec<T>> = Vec::with_capacity(m);
    for (idx, &j) in order.iter().take(k).enumerate() {
        if sigma[idx] <= cutoff || sigma[idx] == 0.0 {
            break;
        }
        ucols.push(w.column(j).iter().map(|x| x.scale(1.0 / sigma[idx])).collect());
    }
    let ucols = complete_basis(&ucols, m);
    (DMat::from_columns(m, &ucols), sigma, v)
}

/// Numerical rank: number of singular values above
/// `max(max(rows,cols)·rel·σ_max, abs_floor)`; zero when `σ_max ≤ abs_floor`.
pub fn numeric_rank<T: Elem>(a: &DMat<T>, rel: f64, abs_floor: f64) -> usize {
    if a.rows == 0 || a.cols == 0 {
        return 0;
    }
    let (_, s, _) = svd(a);
    rank_from_sigma(&s, a.rows.max(a.cols), rel, abs_floor)
}

pub fn rank_from_sigma(sigma: &[f64], dim: usize, rel: f64, abs_floor: f64) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax <= abs_floor {
        return 0;
    }
    let thr = (dim as f64 * rel * smax).max(abs_floor);
    sigma.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis of the null space, `dim = cols − rank`.
pub fn null_space<T: Elem>(a: &DMat<T>, rank: usize) -> Vec<Vec<T>> {
    if a.cols == 0 {
        return Vec::new();
    }
    if a.rows == 0 {
        return DMat::<T>::identity(a.cols).columns();
    }
    let (_, _, v) = svd(a);
    (rank..a.cols).map(|j| v.column(j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Quaternion;
    use num_complex::Complex64;

    fn check_eig<T: Elem>(a: &DMat<T>) {
        let (vals, q) = hermitian_eig(a);
        assert!(q.orthonormality_residual() < 1e-12);
        let d = q.adjoint().matmul(a).matmul(&q);
        let diag = DMat::diag(&vals.iter().map(|&x| T::from_real(x)).collect::<Vec<_>>());
        assert!(d.sub(&diag).max_abs() < 1e-10 * (1.0 + a.max_abs()));
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }

    fn check_svd<T: Elem>(a: &DMat<T>) {
        let (u, s, v) = svd(a);
        assert!(u.orthonormality_residual() < 1e-12, "U not unitary");
        assert!(v.orthonormality_residual() < 1e-12, "V not unitary {} {}x{}", v.orthonormality_residual(), a.rows, a.cols);
        let mut sig = DMat::<T>::zeros(a.rows, a.cols);
        for (i, x) in s.iter().enumerate() {
            sig[(i, i)] = T::from_real(*x);
        }
        let r = u.matmul(&sig).matmul(&v.adjoint());
        assert!(r.sub(a).max_abs() < 1e-10 * (1.0 + a.max_abs()));
    }

    #[test]
    fn eig_real_example() {
        let a = DMat::from_fn(2, 2, |i, j| if i == j { 5.0 } else { 4.0 });
        let (vals, _) = hermitian_eig(&a);
        assert!((vals[0] - 9.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        check_eig(&a);
        check_eig(&DMat::<f64>::identity(3));
        let z = DMat::<f64>::zeros(1, 1);
        assert_eq!(hermitian_eig(&z).0, vec![0.0]);
    }

    #[test]
    fn eig_complex_example() {
        let i = Complex64::new(0.0, 1.0);
        let a = DMat::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => Complex64::new(0.0, 0.0),
        });
        let (vals, _) = hermitian_eig(&a);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] + 1.0).abs() < 1e-12);
        check_eig(&a);
    }

    #[test]
    fn eig_quaternion() {
        let q = |w, x, y, z| Quaternion::new(w, x, y, z);
        let b = DMat::from_fn(3, 3, |i, j| q((i + j) as f64, (i as f64) - 1.0, 0.5 * j as f64, 0.25));
        let a = b.hermitian_part();
        check_eig(&a);
    }

    #[test]
    fn svd_shapes() {
        let a = DMat::from_fn(2, 3, |i, j| [[1.0, 2.0, 0.0], [2.0, 1.0, 0.0]][i][j]);
        let (_, s, _) = svd(&a);
        assert!((s[0] - 3.0).abs() < 1e-12 && (s[1] - 1.0).abs() < 1e-12);
        check_svd(&a);
        check_svd(&a.transpose());
        let e = DMat::<f64>::zeros(1, 0);
        let (u, s, v) = svd(&e);
        assert_eq!((u.rows, u.cols, s.len(), v.rows), (1, 1, 0, 0));
        let z = DMat::<f64>::zeros(1, 1);
        assert_eq!(svd(&z).1, vec![0.0]);
        let q = |w, x, y, z| Quaternion::new(w, x, y, z);
        let h = DMat::from_fn(3, 2, |i, j| q(i as f64, 1.0 - j as f64, 0.3 * (i * j) as f64, -0.7));
        check_svd(&h);
        check_svd(&h.adjoint());
    }
}
