//! Numeric Jordan structure over ℂ.
//!
//! Eigenvalues come from shifted QR on the Hessenberg form. Clusters are
//! grown by single linkage with a radius that widens with the cluster size,
//! because a defective eigenvalue of multiplicity `k` is perturbed by roughly
//! `δ^{1/k}`. Each cluster's generalized eigenspace is isolated with the
//! annihilating product of the other factors `∏ (A − λ_j I)`, the Segre
//! characteristic is read off the rank sequence of the nilpotent part on that
//! subspace, and Jordan chains are built level by level. Every structural
//! inconsistency is reported as [`Error::ClusterAmbiguity`].

use num_complex::Complex64;

use super::cluster::Dsu;
use super::dense::{inverse, pivoted_extend, DMat};
use super::jacobi::{null_space, numeric_rank, svd};
use crate::error::{Error, Result};

type C = Complex64;

const RANK_REL: f64 = 1e-10;

/// One eigenvalue cluster of a Jordan decomposition.
#[derive(Debug, Clone)]
pub struct JordanCluster {
    pub eigenvalue: C,
    /// Jordan block sizes, descending.
    pub segre: Vec<usize>,
    /// Orthonormal basis of the generalized eigenspace (`n × m`).
    pub basis: DMat<C>,
    /// Jordan chains (`n × m`): for each block of size `s`, columns
    /// `p_1..p_s` with `(A − λ)p_1 = 0`, `(A − λ)p_j = p_{j−1}`.
    pub chains: DMat<C>,
}

#[derive(Debug, Clone)]
pub struct JordanStructure {
    pub clusters: Vec<JordanCluster>,
    /// `P` with `P⁻¹ A P = ⊕ J_s(λ)` in cluster/chain order.
    pub transform: DMat<C>,
    pub inverse: DMat<C>,
}

impl JordanStructure {
    pub fn jordan_matrix(&self) -> DMat<C> {
        let mut j = DMat::<C>::zeros(0, 0);
        for cl in &self.clusters {
            for &s in &cl.segre {
                j = j.block_diag(&jordan_block(s, cl.eigenvalue));
            }
        }
        j
    }
}

/// `J_s(λ)`: `λ` on the diagonal, ones on the superdiagonal.
pub fn jordan_block(s: usize, lambda: C) -> DMat<C> {
    DMat::from_fn(s, s, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            C::new(1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    })
}

/// Reduction to upper Hessenberg form by Householder reflections.
fn hessenberg(a: &DMat<C>) -> DMat<C> {
    let n = a.rows;
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xn = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xn == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C::new(1.0, 0.0) };
        let alpha = -phase * xn;
        let mut v = x.clone();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H ← (I − 2vv*) H
        for j in 0..n {
            let s: C = (0..v.len()).map(|t| v[t].conj() * h[(k + 1 + t, j)]).sum();
            for t in 0..v.len() {
                h[(k + 1 + t, j)] -= v[t] * s * 2.0;
            }
        }
        // H ← H (I − 2vv*)
        for i in 0..n {
            let s: C = (0..v.len()).map(|t| h[(i, k + 1 + t)] * v[t]).sum();
            for t in 0..v.len() {
                h[(i, k + 1 + t)] -= s * v[t].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C::new(0.0, 0.0);
        }
    }
    h
}

/// All eigenvalues of a complex square matrix (shifted QR).
pub fn eigenvalues(a: &DMat<C>) -> Result<Vec<C>> {
    assert!(a.is_square());
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(a);
    let mut out = vec![C::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            out[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if sub <= f64::EPSILON * diag.max(f64::MIN_POSITIVE) || sub < 1e-300 {
                h[(l, l - 1)] = C::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::NoConvergence);
        }
        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + C::new(h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, l, hi, shift);
    }
    Ok(out)
}

fn wilkinson(a: C, b: C, c: C, d: C) -> C {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let e1 = tr * 0.5 + disc;
    let e2 = tr * 0.5 - disc;
    if (e1 - d).norm() < (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

fn qr_step(h: &mut DMat<C>, l: usize, hi: usize, mu: C) {
    for k in l..=hi {
        h[(k, k)] -= mu;
    }
    let mut rots: Vec<(f64, C)> = Vec::with_capacity(hi - l);
    for k in l..hi {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (1.0, C::new(0.0, 0.0))
        } else if a.norm() == 0.0 {
            (0.0, b.conj() / b.norm())
        } else {
            let an = a.norm();
            (an / r, (a / an) * b.conj() / r)
        };
        for j in k..=hi {
            let (x, y) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (idx, k) in (l..hi).enumerate() {
        let (c, s) = rots[idx];
        for i in l..=(k + 1).min(hi) {
            let (x, y) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for k in l..=hi {
        h[(k, k)] += mu;
    }
}

/// Merge radius for a cluster of `k` eigenvalues: the larger of
/// `cluster_tol` and `3·(1e-13·scale)^{1/k}`, three times the scatter of a
/// Jordan block of size `k` under a backward error of `1e-13·scale`.
fn merge_radius(k: usize, cluster_tol: f64, scale: f64) -> f64 {
    cluster_tol.max(3.0 * (1e-13 * scale).powf(1.0 / k as f64))
}

/// Groups eigenvalues from the largest candidate size down. At level `k`,
/// single-linkage components under `merge_radius(k)` with at least `k`
/// members that also fit in the ball of that radius about their mean are
/// accepted. A perturbed block scatters on a circle, so pairwise merging at
/// small radii would never join it; the ball test stops chains of distinct
/// eigenvalues from merging at large radii.
fn adaptive_clusters(vals: &[C], cluster_tol: f64, scale: f64) -> Vec<Vec<usize>> {
    let n = vals.len();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for k in (1..=n).rev() {
        let rad = merge_radius(k, cluster_tol, scale);
        let free: Vec<usize> = (0..n).filter(|&i| !assigned[i]).collect();
        if free.len() < k {
            continue;
        }
        let mut dsu = Dsu::new(free.len());
        for a in 0..free.len() {
            for b in a + 1..free.len() {
                if (vals[free[a]] - vals[free[b]]).norm() <= rad {
                    dsu.union(a, b);
                }
            }
        }
        for grp in dsu.groups() {
            let g: Vec<usize> = grp.iter().map(|&a| free[a]).collect();
            let mean = g.iter().map(|&i| vals[i]).sum::<C>() / g.len() as f64;
            let fits = g.iter().all(|&i| (vals[i] - mean).norm() <= rad);
            let accepted: Vec<Vec<usize>> = if g.len() >= k && fits {
                vec![g]
            } else if k == 1 {
                g.iter().map(|&i| vec![i]).collect()
            } else {
                Vec::new()
            };
            for c in accepted {
                for &i in &c {
                    assigned[i] = true;
                }
                out.push(c);
            }
        }
    }
    out
}

fn ambiguity(a: C, b: C) -> Error {
    Error::ClusterAmbiguity { a, b }
}

fn matpow(n: &DMat<C>, k: usize) -> DMat<C> {
    let mut p = DMat::<C>::identity(n.rows);
    for _ in 0..k {
        p = p.matmul(n);
    }
    p
}

fn spectral_norm(a: &DMat<C>) -> f64 {
    if a.rows == 0 || a.cols == 0 {
        return 0.0;
    }
    svd(a).1.first().copied().unwrap_or(0.0)
}

/// Numeric Jordan decomposition of a square complex matrix.
pub fn complex_jordan(a: &DMat<C>, cluster_tol: f64) -> Result<JordanStructure> {
    assert!(a.is_square());
    let n = a.rows;
    if n == 0 {
        return Ok(JordanStructure {
            clusters: Vec::new(),
            transform: DMat::zeros(0, 0),
            inverse: DMat::zeros(0, 0),
        });
    }
    let scale = spectral_norm(a).max(1.0);
    let vals = eigenvalues(a)?;
    let mut groups = adaptive_clusters(&vals, cluster_tol, scale);
    let mean = |g: &Vec<usize>| g.iter().map(|&i| vals[i]).sum::<C>() / g.len() as f64;
    groups.sort_by(|g1, g2| {
        let (m1, m2) = (mean(g1), mean(g2));
        m1.re.total_cmp(&m2.re).then(m1.im.total_cmp(&m2.im))
    });
    let means: Vec<C> = groups.iter().map(mean).collect();
    for i in 0..means.len() {
        for j in i + 1..means.len() {
            if (means[i] - means[j]).norm() < 10.0 * cluster_tol {
                return Err(ambiguity(means[i], means[j]));
            }
        }
    }
    let nearest_other = |i: usize| -> C {
        (0..means.len())
            .filter(|&j| j != i)
            .min_by(|&x, &y| (means[x] - means[i]).norm().total_cmp(&(means[y] - means[i]).norm()))
            .map(|j| means[j])
            .unwrap_or(means[i])
    };

    let mut clusters = Vec::with_capacity(groups.len());
    for (gi, g) in groups.iter().enumerate() {
        let m = g.len();
        let mu = means[gi];
        let fail = || ambiguity(mu, nearest_other(gi));
        let basis = if groups.len() == 1 {
            DMat::<C>::identity(n)
        } else {
            let mut r = DMat::<C>::identity(n);
            for (idx, &lam) in vals.iter().enumerate() {
                if g.contains(&idx) {
                    continue;
                }
                let mut f = a.clone();
                for d in 0..n {
                    f[(d, d)] -= lam;
                }
                let s = f.max_abs().max(1.0);
                r = f.scale(1.0 / s).matmul(&r);
            }
            let (u, _, _) = svd(&r);
            u.select_columns(&(0..m).collect::<Vec<_>>())
        };
        let t = basis.adjoint().matmul(a).matmul(&basis);
        let invariance = a.matmul(&basis).sub(&basis.matmul(&t)).max_abs();
        if invariance > 1e-7 * scale {
            return Err(fail());
        }
        let mut nil = t.clone();
        for d in 0..m {
            nil[(d, d)] -= mu;
        }
        let nil_norm = spectral_norm(&nil).max(1.0);
        let mut ranks = vec![m];
        for k in 1..=m {
            let floor = 1e-9 * scale * nil_norm.powi(k as i32 - 1);
            ranks.push(numeric_rank(&matpow(&nil, k), RANK_REL, floor));
        }
        ranks.push(0);
        if ranks[1] == m || ranks[m] != 0 || ranks.windows(2).any(|w| w[1] > w[0]) {
            return Err(fail());
        }
        let mut segre = Vec::new();
        for k in (1..=m).rev() {
            let count = ranks[k - 1] as i64 - 2 * ranks[k] as i64 + ranks[k + 1] as i64;
            if count < 0 {
                return Err(fail());
            }
            segre.extend(std::iter::repeat(k).take(count as usize));
        }
        let smax = segre[0];
        let spread = g.iter().map(|&i| (vals[i] - mu).norm()).fold(0.0, f64::max);
        if spread > merge_radius(smax, cluster_tol, scale) {
            return Err(fail());
        }
        let local = chain_basis(&nil, &segre, &ranks).ok_or_else(fail)?;
        let chains = basis.matmul(&local);
        clusters.push(JordanCluster { eigenvalue: mu, segre, basis, chains });
    }

    let mut transform = DMat::<C>::zeros(n, 0);
    for cl in &clusters {
        transform = transform.hstack(&cl.chains);
    }
    let inv = inverse(&transform).ok_or_else(|| ambiguity(means[0], means[means.len() - 1]))?;
    let out = JordanStructure { clusters, transform, inverse: inv };
    let recon = out.transform.matmul(&out.jordan_matrix()).matmul(&out.inverse);
    if recon.sub(a).max_abs() > 1e-6 * scale {
        return Err(ambiguity(means[0], means[means.len() - 1]));
    }
    Ok(out)
}

/// Jordan chains for a nilpotent `m×m` matrix with known Segre
/// characteristic and rank sequence `ranks[k] = rank N^k`.
fn chain_basis(nil: &DMat<C>, segre: &[usize], ranks: &[usize]) -> Option<DMat<C>> {
    let m = nil.rows;
    let smax = segre.first().copied().unwrap_or(0);
    let kernels: Vec<Vec<Vec<C>>> =
        (0..=smax).map(|k| if k == 0 { Vec::new() } else { null_space(&matpow(nil, k), ranks[k]) }).collect();
    // heads: (vector, chain length)
    let mut heads: Vec<(Vec<C>, usize)> = Vec::new();
    for level in (1..=smax).rev() {
        let need = segre.iter().filter(|&&s| s == level).count();
        if need == 0 {
            continue;
        }
        let mut avoid_raw: Vec<Vec<C>> = kernels[level - 1].clone();
        for (h, len) in &heads {
            avoid_raw.push(apply_pow(nil, h, len - level));
        }
        let (_, avoid) = pivoted_extend(&[], &avoid_raw, avoid_raw.len(), 1e-9);
        let (_, picked) = pivoted_extend(&avoid, &kernels[level], need, 1e-7);
        if picked.len() < need {
            return None;
        }
        heads.extend(picked.into_iter().map(|v| (v, level)));
    }
    // order chains by length descending (heads already are), columns p_1..p_s
    let mut cols: Vec<Vec<C>> = Vec::with_capacity(m);
    for (h, len) in &heads {
        let mut chain = vec![h.clone()];
        for _ in 1..*len {
            let next = apply_pow(nil, chain.last().unwrap(), 1);
            chain.push(next);
        }
        chain.reverse();
        cols.extend(chain);
    }
    if cols.len() != m {
        return None;
    }
    Some(DMat::from_columns(m, &cols))
}

fn apply_pow(nil: &DMat<C>, v: &[C], k: usize) -> Vec<C> {
    let mut x = v.to_vec();
    for _ in 0..k {
        x = (0..nil.rows).map(|i| (0..nil.cols).map(|j| nil[(i, j)] * x[j]).sum()).collect();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    fn from_real(rows: &[&[f64]]) -> DMat<C> {
        DMat::from_fn(rows.len(), rows[0].len(), |i, j| c(rows[i][j]))
    }

    fn segres(js: &JordanStructure) -> Vec<(C, Vec<usize>)> {
        js.clusters.iter().map(|cl| (cl.eigenvalue, cl.segre.clone())).collect()
    }

    #[test]
    fn nilpotent_block() {
        let js = complex_jordan(&from_real(&[&[0.0, 1.0], &[0.0, 0.0]]), 1e-6).unwrap();
        let s = segres(&js);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].1, vec![2]);
        assert!(s[0].0.norm() < 1e-12);
    }

    #[test]
    fn diagonal_distinct() {
        let js = complex_jordan(&from_real(&[&[1.0, 0.0], &[0.0, 2.0]]), 1e-6).unwrap();
        let s = segres(&js);
        assert_eq!(s.len(), 2);
        assert!((s[0].0 - c(1.0)).norm() < 1e-12 && s[0].1 == vec![1]);
        assert!((s[1].0 - c(2.0)).norm() < 1e-12 && s[1].1 == vec![1]);
    }

    #[test]
    fn mixed_segre() {
        let a = from_real(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let js = complex_jordan(&a, 1e-6).unwrap();
        assert_eq!(segres(&js)[0].1, vec![2, 1]);
        let recon = js.transform.matmul(&js.jordan_matrix()).matmul(&js.inverse);
        assert!(recon.sub(&a).max_abs() < 1e-9);
    }

    #[test]
    fn eigenvalues_of_rotation() {
        let a = from_real(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((ev[0] - C::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - C::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn close_distinct_eigenvalues_are_refused() {
        let a = from_real(&[&[1.0, 0.0], &[0.0, 1.0 + 3e-6]]);
        assert!(matches!(complex_jordan(&a, 1e-6), Err(Error::ClusterAmbiguity { .. })));
    }

    #[test]
    fn defective_size_four_under_similarity() {
        let j = jordan_block(4, C::new(0.5, -0.25)).block_diag(&jordan_block(1, c(2.0)));
        let p = DMat::from_fn(5, 5, |i, k| {
            C::new(if i == k { 2.0 } else { 0.0 } + 0.1 * ((i * 7 + k * 3) % 5) as f64, 0.05 * (i as f64 - k as f64))
        });
        let pinv = inverse(&p).unwrap();
        let a = p.matmul(&j).matmul(&pinv);
        let js = complex_jordan(&a, 1e-6).unwrap();
        let mut s: Vec<Vec<usize>> = js.clusters.iter().map(|c| c.segre.clone()).collect();
        s.sort();
        assert_eq!(s, vec![vec![1], vec![4]]);
    }
}
