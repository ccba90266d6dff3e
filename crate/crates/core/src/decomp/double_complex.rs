//! ℂ ⊕ ℂ with the swap involution `(a, c)* = (c, a)`.
//!
//! A matrix is a pair `(A, C)`; its adjoint is `(Cᵀ, Aᵀ)` and the unitaries
//! are exactly the pairs `(P, P⁻ᵀ)`. Unitary equivalence therefore acts as
//! `A ↦ P⁻¹AQ`, `B ↦ Q⁻¹BP` on `B = Cᵀ`, and unitary similarity of a
//! self-adjoint `(A, Aᵀ)` is ordinary similarity of `A`.
//!
//! The SVD is read off the Jordan structure of the self-adjoint bordered
//! operator `H = [[0, B], [A, 0]]` on `V₁ ⊕ V₂` (`V₁` the column space of
//! `A`, `V₂` its row space). Nonzero eigenvalues of `H` come in `±μ` pairs
//! whose chains split into `AF = GJ`, `BG = FJ`. The zero eigenvalue carries
//! a graded nilpotent operator whose alternating strings give the
//! rectangular and nilpotent generators.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{assemble, scale_of, Factorization, Options, Placement};
use crate::canonical::{reduce_angle, Block, DecompKind};
use crate::engines::dense::{inverse, pivoted_extend, DMat};
use crate::engines::jacobi::{null_space, numeric_rank, svd as csvd};
use crate::engines::jordan::complex_jordan;
use crate::engines::{from_pair_parts, pair_parts};
use crate::error::{Error, Result};
use crate::matrices::Matrix;

type C = Complex64;

const ANGLE_EPS: f64 = 1e-9;

fn ambiguity(a: C, b: C) -> Error {
    Error::ClusterAmbiguity { a, b }
}

fn zero_ambiguity() -> Error {
    ambiguity(C::new(0.0, 0.0), C::new(0.0, 0.0))
}

fn unitary_pair(p: &DMat<C>) -> Result<Matrix> {
    let inv = inverse(p).ok_or_else(zero_ambiguity)?;
    Ok(from_pair_parts(p, &inv.transpose()))
}

/// Self-adjoint `(A, Aᵀ)`: Jordan form of `A` with `V = (P, P⁻ᵀ)`.
pub fn spectral(m: &Matrix, opts: &Options) -> Result<Factorization> {
    let (a, _) = pair_parts(m)?;
    let js = complex_jordan(&a, opts.cluster_tol)?;
    let zero_tol = 1e-10 * scale_of(a.max_abs());
    let mut placements = Vec::new();
    let mut offset = 0;
    for cl in &js.clusters {
        let mu = cl.eigenvalue;
        let (r, theta) = if mu.norm() <= zero_tol { (0.0, 0.0) } else { (mu.norm(), reduce_angle(mu.arg(), 2.0 * PI)) };
        for &s in &cl.segre {
            placements.push(Placement::diag(Block::JordanPair { m: s, r, theta }, (offset..offset + s).collect()));
            offset += s;
        }
    }
    let v = from_pair_parts(&js.transform, &js.inverse.transpose());
    assemble(m, DecompKind::Spectral, v.clone(), v, placements)
}

/// Columns being collected for `X₁` (in `V₁`) and `X₂` (in `V₂`).
#[derive(Default)]
struct Frames {
    x1: Vec<Vec<C>>,
    x2: Vec<Vec<C>>,
    placements: Vec<Placement>,
}

impl Frames {
    /// Adds a block whose `S_A` rows are `g` (in `V₂`) and columns `f` (in `V₁`).
    fn push(&mut self, block: Block, f: Vec<Vec<C>>, g: Vec<Vec<C>>) {
        let cols: Vec<usize> = (self.x1.len()..self.x1.len() + f.len()).collect();
        let rows: Vec<usize> = (self.x2.len()..self.x2.len() + g.len()).collect();
        self.x1.extend(f);
        self.x2.extend(g);
        self.placements.push(Placement::new(block, rows, cols));
    }
}

pub fn svd(m: &Matrix, opts: &Options) -> Result<Factorization> {
    let (a, c) = pair_parts(m)?;
    let (rows, cols) = (a.rows, a.cols);
    let b = c.transpose();
    let (n, mm) = (cols, rows);
    let dim = n + mm;
    let mut h = DMat::<C>::zeros(dim, dim);
    for i in 0..n {
        for j in 0..mm {
            h[(i, n + j)] = b[(i, j)];
            h[(n + j, i)] = a[(j, i)];
        }
    }
    let js = complex_jordan(&h, opts.cluster_tol)?;
    let scale = scale_of(h.max_abs());
    let zero_tol = 1e-10 * scale;
    let mut frames = Frames::default();
    let mut kept_dim = 0;
    let mut zero_seen = false;
    let mut nonzero_dim = 0;
    for cl in &js.clusters {
        let mu = cl.eigenvalue;
        let size: usize = cl.segre.iter().sum();
        if mu.norm() <= zero_tol {
            if zero_seen {
                return Err(zero_ambiguity());
            }
            zero_seen = true;
            zero_strings(&a, &b, &cl.basis, scale, &mut frames)?;
            continue;
        }
        nonzero_dim += size;
        let t = mu.arg();
        if !(t > -ANGLE_EPS && t <= PI - ANGLE_EPS) {
            continue;
        }
        kept_dim += size;
        let (r, theta) = (mu.norm(), reduce_angle(t, PI));
        let mut off = 0;
        for &s in &cl.segre {
            let f: Vec<Vec<C>> = (off..off + s).map(|j| cl.chains.column(j)[..n].to_vec()).collect();
            let g: Vec<Vec<C>> = (off..off + s).map(|j| cl.chains.column(j)[n..].to_vec()).collect();
            frames.push(Block::JordanPair { m: s, r, theta }, f, g);
            off += s;
        }
    }
    if 2 * kept_dim != nonzero_dim || frames.x1.len() != n || frames.x2.len() != mm {
        let mu = js.clusters.first().map_or(C::new(0.0, 0.0), |c| c.eigenvalue);
        return Err(ambiguity(mu, -mu));
    }
    let x1 = DMat::from_columns(n, &frames.x1);
    let x2 = DMat::from_columns(mm, &frames.x2);
    let left = unitary_pair(&x2)?;
    let right = unitary_pair(&x1)?;
    assemble(m, DecompKind::Svd, left, right, frames.placements)
}

fn matpow(h: &DMat<C>, k: usize) -> DMat<C> {
    let mut p = DMat::<C>::identity(h.rows);
    for _ in 0..k {
        p = p.matmul(h);
    }
    p
}

fn apply(h: &DMat<C>, v: &[C]) -> Vec<C> {
    (0..h.rows).map(|i| (0..h.cols).map(|j| h[(i, j)] * v[j]).sum()).collect()
}

/// Orthonormal basis of the column space of `x` (numerical rank).
fn range_basis(x: &DMat<C>, scale: f64) -> DMat<C> {
    if x.rows == 0 {
        return DMat::zeros(0, 0);
    }
    let (u, sigma, _) = csvd(x);
    let r = crate::engines::jacobi::rank_from_sigma(&sigma, x.rows.max(x.cols), 1e-10, 1e-8 * scale);
    u.select_columns(&(0..r).collect::<Vec<_>>())
}

/// Decomposes the zero generalized eigenspace of `H` into alternating
/// strings and records the matching generators.
fn zero_strings(a: &DMat<C>, b: &DMat<C>, basis: &DMat<C>, scale: f64, frames: &mut Frames) -> Result<()> {
    let (n, mm) = (b.rows, a.rows);
    let z = basis.cols;
    let top = basis.select_rows(&(0..n).collect::<Vec<_>>());
    let bottom = basis.select_rows(&(n..n + mm).collect::<Vec<_>>());
    let q1 = range_basis(&top, 1.0);
    let q2 = range_basis(&bottom, 1.0);
    let (z1, z2) = (q1.cols, q2.cols);
    if z1 + z2 != z {
        return Err(zero_ambiguity());
    }
    let ar = q2.adjoint().matmul(a).matmul(&q1);
    let br = q1.adjoint().matmul(b).matmul(&q2);
    let mut hr = DMat::<C>::zeros(z, z);
    for i in 0..z1 {
        for j in 0..z2 {
            hr[(i, z1 + j)] = br[(i, j)];
            hr[(z1 + j, i)] = ar[(j, i)];
        }
    }
    // embeddings of Z₁ and Z₂ into the z-dimensional coordinates
    let e = [
        DMat::from_fn(z, z1, |i, j| if i == j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }),
        DMat::from_fn(z, z2, |i, j| if i == z1 + j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }),
    ];
    let hnorm = crate::engines::jacobi::svd(&hr).1.first().copied().unwrap_or(0.0).max(1.0);
    // rho[v][k] = rank of H^k on Z_v, k = 0..=z+1
    let mut rho = [vec![z1], vec![z2]];
    let mut powers = vec![DMat::<C>::identity(z)];
    for k in 1..=z + 1 {
        powers.push(powers[k - 1].matmul(&hr));
        let floor = 1e-9 * scale * hnorm.powi(k as i32 - 1);
        for v in 0..2 {
            let w = powers[k].matmul(&e[v]);
            let rk = if w.cols == 0 { 0 } else { numeric_rank(&w, 1e-10, floor) };
            rho[v].push(rk);
        }
    }
    for v in 0..2 {
        if rho[v].windows(2).any(|w| w[1] > w[0]) || rho[v][z + 1] != 0 {
            return Err(zero_ambiguity());
        }
    }
    let delta = |v: usize, k: usize| rho[v][k] as i64 - rho[v][k + 1] as i64;
    // strings with length ≥ ℓ ending at tail t
    let at_least = |l: usize, t: usize| -> i64 {
        if l > z {
            return 0;
        }
        let v = if l % 2 == 1 { t } else { 1 - t };
        delta(v, l - 1)
    };
    // count[l][t]
    let mut count = vec![[0usize; 2]; z + 2];
    let mut total = 0;
    for l in 1..=z {
        for t in 0..2 {
            let c = at_least(l, t) - at_least(l + 1, t);
            if c < 0 {
                return Err(zero_ambiguity());
            }
            count[l][t] = c as usize;
            total += l * c as usize;
        }
    }
    if total != z {
        return Err(zero_ambiguity());
    }

    // heads: (vector in z coordinates, length, head vertex)
    let kernel = |v: usize, k: usize| -> Vec<Vec<C>> {
        if k == 0 {
            return Vec::new();
        }
        let w = powers[k].matmul(&e[v]);
        null_space(&w, rho[v][k]).into_iter().map(|x| apply(&e[v], &x)).collect()
    };
    let mut heads: Vec<(Vec<C>, usize, usize)> = Vec::new();
    for l in (1..=z).rev() {
        for h in 0..2 {
            // a string of length l headed at h ends at t
            let t = if l % 2 == 1 { h } else { 1 - h };
            let need = count[l][t];
            if need == 0 {
                continue;
            }
            let mut avoid_raw = kernel(h, l - 1);
            for (v, len, hv) in &heads {
                let steps = len - l;
                let lands = if steps % 2 == 0 { *hv } else { 1 - *hv };
                if lands == h {
                    avoid_raw.push(apply(&matpow(&hr, steps), v));
                }
            }
            let (_, avoid) = pivoted_extend(&[], &avoid_raw, avoid_raw.len(), 1e-9);
            let (_, picked) = pivoted_extend(&avoid, &kernel(h, l), need, 1e-7);
            if picked.len() < need {
                return Err(zero_ambiguity());
            }
            heads.extend(picked.into_iter().map(|v| (v, l, h)));
        }
    }

    let lift1 = |x: &[C]| apply(&q1, &x[..z1]);
    let lift2 = |x: &[C]| apply(&q2, &x[z1..]);
    for (head, l, h) in heads {
        let t = if l % 2 == 1 { h } else { 1 - h };
        let mut c = vec![head];
        for _ in 1..l {
            let next = apply(&hr, c.last().unwrap());
            c.push(next);
        }
        let (block, f, g): (Block, Vec<Vec<C>>, Vec<Vec<C>>) = match (l % 2, t) {
            (1, 0) => {
                let k = l / 2;
                let f = (1..=k + 1).map(|i| lift1(&c[2 * (i - 1)])).collect();
                let g = (1..=k).map(|i| lift2(&c[2 * i - 1])).collect();
                (if k == 0 { Block::EmptyCol } else { Block::SingularPairRow(k) }, f, g)
            }
            (1, _) => {
                let k = l / 2;
                let g = (1..=k + 1).map(|i| lift2(&c[2 * (i - 1)])).collect();
                let f = (1..=k).map(|i| lift1(&c[2 * i - 1])).collect();
                (if k == 0 { Block::EmptyRow } else { Block::SingularPairCol(k) }, f, g)
            }
            (_, 0) => {
                let k = l / 2;
                let g = (1..=k).map(|i| lift2(&c[2 * (k - i)])).collect();
                let f = (1..=k).map(|i| lift1(&c[2 * (k - i) + 1])).collect();
                (Block::JordanZeroLeft(k), f, g)
            }
            _ => {
                let k = l / 2;
                let f = (1..=k).map(|i| lift1(&c[2 * (k - i)])).collect();
                let g = (1..=k).map(|i| lift2(&c[2 * (k - i) + 1])).collect();
                (Block::JordanZeroRight(k), f, g)
            }
        };
        frames.push(block, f, g);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{multiset_eq, to_matrix, BlockMultiset};
    use crate::scalars::{RingId, Scalar};

    fn pair(a: &[&[f64]], c: &[&[f64]]) -> Matrix {
        let (r, k) = (a.len(), a.first().map_or(0, |x| x.len()));
        Matrix::from_fn(RingId::DoubleComplexSwap, r, k, |i, j| {
            Scalar::DoubleComplex(C::new(a[i][j], 0.0), C::new(c[i][j], 0.0))
        })
    }

    fn svd_blocks(m: &Matrix) -> BlockMultiset {
        let f = svd(m, &Options::default()).unwrap();
        assert!(f.residual < 1e-9, "residual {}", f.residual);
        f.blocks
    }

    #[test]
    fn each_generator_is_its_own_svd() {
        let gens = [
            Block::JordanPair { m: 2, r: 1.5, theta: 0.4 },
            Block::SingularPairRow(1),
            Block::SingularPairCol(2),
            Block::JordanZeroLeft(2),
            Block::JordanZeroRight(1),
            Block::EmptyRow,
            Block::EmptyCol,
        ];
        for g in gens {
            let m = to_matrix(&g, RingId::DoubleComplexSwap).unwrap();
            let got = svd_blocks(&m);
            assert!(multiset_eq(&got, &BlockMultiset::new(vec![g.clone()]), 1e-8), "{g}: {got:?}");
        }
    }

    #[test]
    fn zero_pair_is_all_empties() {
        let m = pair(&[&[0.0, 0.0]], &[&[0.0, 0.0]]);
        let got = svd_blocks(&m);
        let want = BlockMultiset::new(vec![Block::EmptyRow, Block::EmptyCol, Block::EmptyCol]);
        assert!(multiset_eq(&got, &want, 0.0));
    }

    #[test]
    fn spectral_of_pair_embedding() {
        let m = pair(&[&[0.0, 1.0], &[0.0, 0.0]], &[&[0.0, 0.0], &[1.0, 0.0]]);
        let f = spectral(&m, &Options::default()).unwrap();
        assert_eq!(f.blocks.items(), &[Block::JordanPair { m: 2, r: 0.0, theta: 0.0 }]);
        let m = pair(&[&[-2.0]], &[&[-2.0]]);
        let f = spectral(&m, &Options::default()).unwrap();
        match f.blocks.items() {
            [Block::JordanPair { m: 1, r, theta }] => assert!((r - 2.0).abs() < 1e-12 && (theta - PI).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }
}
