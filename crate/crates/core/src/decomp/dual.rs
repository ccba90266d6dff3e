//! Dual numbers `ℝ[ε]/(ε²)` with the trivial or the conjugate involution.
//!
//! `M = M₀ + εM₁` is reduced in two stages. The real part is diagonalized by
//! a real orthogonal factor `Ū`. A first-order correction `Ū(I + εK)`
//! then clears every ε-entry that couples distinct clusters of the real
//! spectrum. Finally each cluster's projected ε-part is canonicalized by a
//! real orthogonal rotation that preserves the cluster's real part.
//!
//! `(I + εK)* = I − εK` holds when `K` is antisymmetric (trivial involution)
//! or symmetric (conjugate involution), which makes `I + εK` unitary.

use super::classical::svd_rank;
use super::{assemble, scale_of, Factorization, Options, Placement};
use crate::canonical::{Block, DecompKind};
use crate::engines::antisym::antisymmetric_canonical;
use crate::engines::jacobi::{hermitian_eig, svd as real_svd};
use crate::engines::{cluster_real, dual_parts, from_dual_parts, DMat};
use crate::error::Result;
use crate::matrices::Matrix;
use crate::scalars::RingId;

fn sym(a: &DMat<f64>) -> DMat<f64> {
    a.add(&a.transpose()).scale(0.5)
}

fn antisym(a: &DMat<f64>) -> DMat<f64> {
    a.sub(&a.transpose()).scale(0.5)
}

/// Threshold below which an ε-coefficient counts as zero.
fn eps_zero(dim: usize, opts: &Options, scale: f64) -> f64 {
    10.0 * dim.max(1) as f64 * opts.rank_tol * scale
}

/// Writes `q` into `w` on the index set `idx`.
fn embed(w: &mut DMat<f64>, idx: &[usize], q: &DMat<f64>) {
    for (s, &i) in idx.iter().enumerate() {
        for (t, &j) in idx.iter().enumerate() {
            w[(i, j)] = q[(s, t)];
        }
    }
}

/// `Ū(I + εK)W` as a dual matrix.
fn corrected(ring: RingId, base: &DMat<f64>, k: &DMat<f64>, w: &DMat<f64>) -> Matrix {
    from_dual_parts(ring, &base.matmul(w), &base.matmul(k).matmul(w))
}

/// Cluster-internal canonicalization shared by both kinds. Given the
/// projected ε-part `nc` of a cluster with real value `x`, returns the
/// rotation and the blocks on local indices.
fn cluster_blocks(
    ring: RingId,
    kind: DecompKind,
    x: f64,
    zero_cluster: bool,
    nc: &DMat<f64>,
    eps_tol: f64,
    opts: &Options,
) -> (DMat<f64>, Vec<(Block, Vec<usize>)>) {
    let mut out = Vec::new();
    if ring == RingId::DualTrivial {
        let (d, q) = hermitian_eig(&sym(nc));
        for (t, &y) in d.iter().enumerate() {
            let b = if !zero_cluster {
                Block::DualScalar { x, y }
            } else if y.abs() <= eps_tol {
                Block::ZeroScalar
            } else {
                Block::DualEps(y)
            };
            out.push((b, vec![t]));
        }
        return (q, out);
    }
    let c = antisymmetric_canonical(&antisym(nc), eps_tol, opts.cluster_tol * scale_of(nc.max_abs()));
    for (p, &y) in c.pairs.iter().enumerate() {
        let x = if zero_cluster { 0.0 } else { x };
        out.push((Block::DualRot2 { x, y }, vec![2 * p, 2 * p + 1]));
    }
    for t in 2 * c.pairs.len()..nc.rows {
        let b = match (zero_cluster, kind) {
            (true, _) => Block::ZeroScalar,
            (false, DecompKind::Svd) => Block::PosScalar(x),
            (false, _) => Block::SignedScalar(x),
        };
        out.push((b, vec![t]));
    }
    (c.q, out)
}

/// Solves `[[a, b], [c, d]] · [k, l] = [e, f]`.
fn solve2(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> (f64, f64) {
    let det = a * d - b * c;
    ((e * d - b * f) / det, (a * f - e * c) / det)
}

pub fn svd(m: &Matrix, opts: &Options) -> Result<Factorization> {
    let ring = m.ring();
    let conj = ring == RingId::DualConj;
    // K_ba = mirror · K_ab
    let mirror = if conj { 1.0 } else { -1.0 };
    let (m0, m1) = dual_parts(m)?;
    let (rows, cols) = (m0.rows, m0.cols);
    let (u, sigma, v) = real_svd(&m0);
    let r = svd_rank(&sigma, rows.max(cols), opts);
    let n = u.transpose().matmul(&m1).matmul(&v);
    let scale = scale_of(m0.max_abs().max(m1.max_abs()));
    let eps_tol = eps_zero(rows.max(cols), opts, scale);
    let clusters = cluster_real(&sigma[..r], opts.cluster_tol * scale_of(sigma.first().copied().unwrap_or(0.0)));
    let mut cid = vec![0usize; r];
    for (c, cl) in clusters.iter().enumerate() {
        for &i in &cl.members {
            cid[i] = c;
        }
    }

    let mut k = DMat::<f64>::zeros(rows, rows);
    let mut l = DMat::<f64>::zeros(cols, cols);
    for a in 0..r {
        for b in a + 1..r {
            if cid[a] == cid[b] {
                continue;
            }
            let (sa, sb) = (sigma[a], sigma[b]);
            // entry (a,b): N_ab − K_ab σ_b + σ_a L_ab = 0
            // entry (b,a): N_ba + mirror·(σ_b L_ab − K_ab σ_a) = 0
            let (kab, lab) = solve2(-sb, sa, -mirror * sa, mirror * sb, -n[(a, b)], -n[(b, a)]);
            k[(a, b)] = kab;
            k[(b, a)] = mirror * kab;
            l[(a, b)] = lab;
            l[(b, a)] = mirror * lab;
        }
        for b in r..cols {
            l[(a, b)] = -n[(a, b)] / sigma[a];
            l[(b, a)] = mirror * l[(a, b)];
        }
        for b in r..rows {
            k[(b, a)] = n[(b, a)] / sigma[a];
            k[(a, b)] = mirror * k[(b, a)];
        }
    }

    let mut wu = DMat::<f64>::identity(rows);
    let mut wv = DMat::<f64>::identity(cols);
    let mut placements = Vec::new();
    for cl in &clusters {
        let idx = &cl.members;
        let x = cl.mean.re;
        let nc = n.submatrix(idx, idx);
        // the part of nc removable by K on this cluster
        let removable = if conj { sym(&nc) } else { antisym(&nc) };
        let kc = removable.scale(1.0 / x);
        embed(&mut k, idx, &kc);
        let (q, blocks) = cluster_blocks(ring, DecompKind::Svd, x, false, &nc, eps_tol, opts);
        embed(&mut wu, idx, &q);
        embed(&mut wv, idx, &q);
        for (b, local) in blocks {
            let g: Vec<usize> = local.iter().map(|&t| idx[t]).collect();
            placements.push(Placement::diag(b, g));
        }
    }
    // zero part: real SVD of the projected ε-block
    let zr: Vec<usize> = (r..rows).collect();
    let zc: Vec<usize> = (r..cols).collect();
    let (p, d, q) = real_svd(&n.submatrix(&zr, &zc));
    let rank0 = d.iter().filter(|&&y| y > eps_tol).count();
    embed(&mut wu, &zr, &p);
    embed(&mut wv, &zc, &q);
    for t in 0..rank0 {
        placements.push(Placement::new(Block::DualEps(d[t]), vec![r + t], vec![r + t]));
    }
    placements.extend(super::classical::empty_placements(r + rank0, rows, cols));

    let left = corrected(ring, &u, &k, &wu);
    let right = corrected(ring, &v, &l, &wv);
    assemble(m, DecompKind::Svd, left, right, placements)
}

pub fn spectral(m: &Matrix, opts: &Options) -> Result<Factorization> {
    let ring = m.ring();
    let conj = ring == RingId::DualConj;
    let (m0, m1) = dual_parts(m)?;
    let m0 = sym(&m0);
    let m1 = if conj { antisym(&m1) } else { sym(&m1) };
    let dim = m0.rows;
    let (vals, vbar) = hermitian_eig(&m0);
    let n = vbar.transpose().matmul(&m1).matmul(&vbar);
    let lam_scale = scale_of(vals.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    let scale = scale_of(m0.max_abs().max(m1.max_abs()));
    let eps_tol = eps_zero(dim, opts, scale);
    let zero_tol = dim as f64 * opts.rank_tol * lam_scale;
    let clusters = cluster_real(&vals, opts.cluster_tol * lam_scale);
    let mut cid = vec![0usize; dim];
    for (c, cl) in clusters.iter().enumerate() {
        for &i in &cl.members {
            cid[i] = c;
        }
    }
    let mut k = DMat::<f64>::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            if cid[a] != cid[b] {
                k[(a, b)] = -n[(a, b)] / (vals[a] - vals[b]);
            }
        }
    }
    let mut w = DMat::<f64>::identity(dim);
    let mut placements = Vec::new();
    for cl in &clusters {
        let idx = &cl.members;
        let x = cl.mean.re;
        let zero_cluster = x.abs() <= zero_tol;
        let nc = n.submatrix(idx, idx);
        let (q, blocks) = cluster_blocks(ring, DecompKind::Spectral, x, zero_cluster, &nc, eps_tol, opts);
        embed(&mut w, idx, &q);
        for (b, local) in blocks {
            placements.push(Placement::diag(b, local.iter().map(|&t| idx[t]).collect()));
        }
    }
    let vd = corrected(ring, &vbar, &k, &w);
    assemble(m, DecompKind::Spectral, vd.clone(), vd, placements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{multiset_eq, BlockMultiset};
    use crate::scalars::{Dual, Scalar};

    fn dual(ring: RingId, rows: usize, cols: usize, v: &[(f64, f64)]) -> Matrix {
        Matrix::from_fn(ring, rows, cols, |i, j| {
            let d = Dual::new(v[i * cols + j].0, v[i * cols + j].1);
            if ring == RingId::DualConj {
                Scalar::DualConj(d)
            } else {
                Scalar::DualTrivial(d)
            }
        })
    }

    #[test]
    fn conj_rotation_block() {
        let m = dual(RingId::DualConj, 2, 2, &[(1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (1.0, 0.0)]);
        let f = spectral(&m, &Options::default()).unwrap();
        let want = BlockMultiset::new(vec![Block::DualRot2 { x: 1.0, y: 1.0 }]);
        assert!(multiset_eq(&f.blocks, &want, 1e-12), "{:?}", f.blocks);
        assert!(f.residual < 1e-14);
        assert!(f.left.is_unitary(1e-12));
    }

    #[test]
    fn pure_eps_svd() {
        let m = dual(RingId::DualConj, 1, 1, &[(0.0, 2.0)]);
        let f = svd(&m, &Options::default()).unwrap();
        assert_eq!(f.blocks.items(), &[Block::DualEps(2.0)]);
        let m = dual(RingId::DualTrivial, 1, 1, &[(0.0, -2.0)]);
        let f = svd(&m, &Options::default()).unwrap();
        assert_eq!(f.blocks.items(), &[Block::DualEps(2.0)]);
        assert!(f.residual < 1e-15);
    }

    #[test]
    fn trivial_scalar_keeps_eps() {
        let m = dual(RingId::DualTrivial, 2, 2, &[(2.0, 0.5), (0.0, 0.3), (0.0, 0.3), (1.0, -1.0)]);
        let f = spectral(&m, &Options::default()).unwrap();
        assert!(f.residual < 1e-13, "{}", f.residual);
        assert_eq!(f.blocks.len(), 2);
        assert!(f.blocks.iter().all(|b| matches!(b, Block::DualScalar { .. })));
    }

    #[test]
    fn mixed_rank_svd() {
        let m = dual(
            RingId::DualTrivial,
            3,
            2,
            &[(1.0, 0.2), (2.0, -0.1), (2.0, 0.7), (4.0, 0.0), (0.0, 0.5), (0.0, 1.0)],
        );
        let f = svd(&m, &Options::default()).unwrap();
        assert!(f.residual < 1e-12, "{}", f.residual);
        assert!(f.left.is_unitary(1e-10) && f.right.is_unitary(1e-10));
    }
}
