//! Real antisymmetric canonical form `Qᵀ A Q = ⊕ [[0, −y], [y, 0]] ⊕ 0`.

use num_complex::Complex64;

use super::cluster::cluster_real;
use super::dense::{norm, project_out, DMat};
use super::jacobi::hermitian_eig;

#[derive(Debug, Clone)]
pub struct AntisymCanonical {
    /// Orthogonal; columns come in pairs `(v_i, w_i)` followed by the kernel.
    pub q: DMat<f64>,
    /// Rotation rates `y_i > 0`, descending.
    pub pairs: Vec<f64>,
    pub zeros: usize,
}

/// Canonicalises an antisymmetric matrix. Rates at or below `zero_tol` count
/// as zero; rates within `cluster_tol` share an invariant subspace.
pub fn antisymmetric_canonical(a: &DMat<f64>, zero_tol: f64, cluster_tol: f64) -> AntisymCanonical {
    let n = a.rows;
    // AᵀA = −A² is PSD with eigenvalues y² of even multiplicity.
    let ata = a.transpose().matmul(a);
    let (vals, vecs) = hermitian_eig(&ata);
    let rates: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let nonzero: Vec<usize> = (0..n).filter(|&i| rates[i] > zero_tol).collect();
    let zero_idx: Vec<usize> = (0..n).filter(|&i| rates[i] <= zero_tol).collect();

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pairs = Vec::new();
    let nz_rates: Vec<f64> = nonzero.iter().map(|&i| rates[i]).collect();
    for cl in cluster_real(&nz_rates, cluster_tol) {
        let mut pool: Vec<Vec<f64>> = cl.members.iter().map(|&k| vecs.column(nonzero[k])).collect();
        let want = pool.len() / 2;
        for _ in 0..want {
            // pick the pool vector with the largest residual
            let mut best: Option<(usize, f64)> = None;
            for (idx, p) in pool.iter_mut().enumerate() {
                project_out(p, &columns);
                let nr = norm(p);
                if best.map_or(true, |(_, b)| nr > b) {
                    best = Some((idx, nr));
                }
            }
            let Some((idx, nr)) = best else { break };
            if nr < 1e-8 {
                break;
            }
            let v: Vec<f64> = pool.remove(idx).iter().map(|x| x / nr).collect();
            let av = matvec(a, &v);
            let y = norm(&av);
            let mut w: Vec<f64> = av.iter().map(|x| x / y).collect();
            let mut fam = columns.clone();
            fam.push(v.clone());
            project_out(&mut w, &fam);
            let wn = norm(&w);
            let w: Vec<f64> = w.iter().map(|x| x / wn).collect();
            columns.push(v);
            columns.push(w);
            pairs.push(y);
        }
    }
    // Kernel directions; re-orthogonalise against the pairs.
    let mut zeros = 0;
    for &i in &zero_idx {
        let mut z = vecs.column(i);
        project_out(&mut z, &columns);
        let nz = norm(&z);
        if nz > 1e-8 {
            columns.push(z.iter().map(|x| x / nz).collect());
            zeros += 1;
        }
    }
    // Any leftover dimension (odd cluster sizes from noise) is completed as kernel.
    if columns.len() < n {
        let full = super::dense::complete_basis(&columns, n);
        zeros += full.len() - columns.len();
        columns = full;
    }
    // Sort pairs by rate, descending, keeping (v, w) together.
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&i, &j| pairs[j].total_cmp(&pairs[i]));
    let mut sorted_cols = Vec::with_capacity(n);
    for &p in &order {
        sorted_cols.push(columns[2 * p].clone());
        sorted_cols.push(columns[2 * p + 1].clone());
    }
    sorted_cols.extend(columns[2 * pairs.len()..].iter().cloned());
    let q = DMat::from_columns(n, &sorted_cols);
    // Recompute rates from the final basis.
    let t = q.transpose().matmul(a).matmul(&q);
    let pairs = (0..pairs.len()).map(|p| t[(2 * p + 1, 2 * p)]).collect();
    AntisymCanonical { q, pairs, zeros }
}

fn matvec(a: &DMat<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.rows).map(|i| (0..a.cols).map(|j| a[(i, j)] * v[j]).sum()).collect()
}

/// The spectrum `{±i·y} ∪ {0…}` implied by a canonical form.
pub fn implied_spectrum(c: &AntisymCanonical) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = c
        .pairs
        .iter()
        .flat_map(|&y| [Complex64::new(0.0, y), Complex64::new(0.0, -y)])
        .collect();
    out.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(c.zeros));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &DMat<f64>) -> AntisymCanonical {
        let c = antisymmetric_canonical(a, 1e-10, 1e-6);
        assert!(c.q.orthonormality_residual() < 1e-10);
        let t = c.q.transpose().matmul(a).matmul(&c.q);
        let mut expect = DMat::<f64>::zeros(a.rows, a.cols);
        for (p, &y) in c.pairs.iter().enumerate() {
            expect[(2 * p, 2 * p + 1)] = -y;
            expect[(2 * p + 1, 2 * p)] = y;
        }
        assert!(t.sub(&expect).max_abs() < 1e-9, "residual {}", t.sub(&expect).max_abs());
        assert!(c.pairs.iter().all(|&y| y > 0.0));
        c
    }

    #[test]
    fn already_canonical() {
        let a = DMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => -1.0,
            (1, 0) => 1.0,
            _ => 0.0,
        });
        let c = check(&a);
        assert_eq!(c.zeros, 0);
        assert!((c.pairs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let c = check(&DMat::zeros(3, 3));
        assert!(c.pairs.is_empty());
        assert_eq!(c.zeros, 3);
    }

    #[test]
    fn embedded_pair() {
        let a = DMat::from_fn(3, 3, |i, j| match (i, j) {
            (0, 1) => 2.0,
            (1, 0) => -2.0,
            _ => 0.0,
        });
        let c = check(&a);
        assert_eq!(c.zeros, 1);
        assert!((c.pairs[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_rates() {
        // two identical rotation planes mixed by a rotation
        let mut a = DMat::<f64>::zeros(4, 4);
        a[(0, 1)] = -1.5;
        a[(1, 0)] = 1.5;
        a[(2, 3)] = -1.5;
        a[(3, 2)] = 1.5;
        let (s, c) = (0.6, 0.8);
        let mut r = DMat::<f64>::identity(4);
        r[(0, 0)] = c;
        r[(0, 2)] = -s;
        r[(2, 0)] = s;
        r[(2, 2)] = c;
        let b = r.transpose().matmul(&a).matmul(&r);
        let cc = check(&b);
        assert_eq!(cc.pairs.len(), 2);
    }
}
