//! Symmetric integer matrices under signed-permutation similarity.
//!
//! The unitaries over ℤ are the signed permutation matrices, so a symmetric
//! matrix is a signed graph with loops and its indecomposable summands are
//! the connected components of the off-diagonal support. Each component is
//! put in canonical form by exhaustive search over relabelings, with signs
//! chosen by an exact branch-and-bound in row-major order.

use std::cmp::Ordering;

use itertools::Itertools;

use super::{assemble, Factorization, Options, Placement};
use crate::canonical::{Block, BlockMultiset, DecompKind};
use crate::engines::cluster::Dsu;
use crate::error::{Error, Result};
use crate::matrices::Matrix;
use crate::scalars::{RingId, Scalar};

pub const DEFAULT_SIZE_CAP: usize = 8;

/// Entry order for lexicographic comparison: `0 < 1 < −1 < 2 < −2 < …`.
fn key(x: i64) -> (u64, bool) {
    (x.unsigned_abs(), x < 0)
}

fn cmp_entry(a: i64, b: i64) -> Ordering {
    key(a).cmp(&key(b))
}

fn integer_entries(m: &Matrix) -> Result<Vec<Vec<i64>>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| match m.get(i, j) {
                    Scalar::Integer(v) => Ok(v),
                    Scalar::Real(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => Ok(x as i64),
                    _ => Err(Error::NotInteger),
                })
                .collect()
        })
        .collect()
}

/// Connected components of the off-diagonal support, each sorted.
pub fn components(g: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut dsu = Dsu::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if g[i][j] != 0 {
                dsu.union(i, j);
            }
        }
    }
    dsu.groups()
}

pub fn is_connected(g: &[Vec<i64>]) -> bool {
    components(g).len() <= 1
}

struct Search<'a> {
    g: &'a [Vec<i64>],
    /// upper-triangle positions in row-major order
    order: Vec<(usize, usize)>,
    best: Option<(Vec<i64>, Vec<usize>, Vec<i64>)>,
}

impl Search<'_> {
    /// Explores sign choices for the relabeling `perm`, keeping the
    /// lexicographically least upper-triangle sequence.
    fn run(&mut self, perm: &[usize]) {
        let n = perm.len();
        let mut signs = vec![0i64; n];
        signs[0] = 1;
        let mut seq = Vec::with_capacity(self.order.len());
        self.dfs(perm, 0, &mut signs, &mut seq);
    }

    /// Order of `seq` against the same-length prefix of the current best.
    /// Recomputed per node because the best changes during the search.
    fn prefix_cmp(&self, seq: &[i64]) -> Ordering {
        match &self.best {
            None => Ordering::Less,
            Some((bs, _, _)) => {
                seq.iter().zip(bs).map(|(&a, &b)| cmp_entry(a, b)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
            }
        }
    }

    fn dfs(&mut self, perm: &[usize], pos: usize, signs: &mut Vec<i64>, seq: &mut Vec<i64>) {
        if pos == self.order.len() {
            if self.prefix_cmp(seq) == Ordering::Less {
                let s = signs.iter().map(|&x| if x == 0 { 1 } else { x }).collect();
                self.best = Some((seq.clone(), perm.to_vec(), s));
            }
            return;
        }
        let (i, j) = self.order[pos];
        let v = self.g[perm[i]][perm[j]];
        // (value, sign assignments); a free sign is always set to make the
        // entry non-negative, since |v| precedes −|v|
        let mut options: Vec<(i64, Option<(usize, i64)>, Option<(usize, i64)>)> = Vec::new();
        if i == j || v == 0 {
            options.push((v, None, None));
        } else {
            match (signs[i], signs[j]) {
                (0, 0) => {
                    let sj = if v > 0 { 1 } else { -1 };
                    options.push((v.abs(), Some((i, 1)), Some((j, sj))));
                    options.push((v.abs(), Some((i, -1)), Some((j, -sj))));
                }
                (si, 0) => options.push((v.abs(), None, Some((j, si * v.signum())))),
                (0, sj) => options.push((v.abs(), Some((i, sj * v.signum())), None)),
                (si, sj) => options.push((si * sj * v, None, None)),
            }
        }
        for (val, a, b) in options {
            seq.push(val);
            if self.prefix_cmp(seq) != Ordering::Greater {
                for (k, s) in [a, b].into_iter().flatten() {
                    signs[k] = s;
                }
                self.dfs(perm, pos + 1, signs, seq);
                for (k, _) in [a, b].into_iter().flatten() {
                    signs[k] = 0;
                }
            }
            seq.pop();
        }
    }
}

/// Lexicographically least `s_i s_j g[π(i)][π(j)]` over relabelings `π` and
/// signs `s`. Returns the canonical matrix, `π` and `s`.
pub fn canonical_component(g: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<usize>, Vec<i64>) {
    let n = g.len();
    if n == 0 {
        return (Vec::new(), Vec::new(), Vec::new());
    }
    let order: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut search = Search { g, order, best: None };
    for perm in (0..n).permutations(n) {
        search.run(&perm);
    }
    let (_, perm, signs) = search.best.expect("at least one permutation");
    let canon = (0..n).map(|i| (0..n).map(|j| signs[i] * signs[j] * g[perm[i]][perm[j]]).collect()).collect();
    (canon, perm, signs)
}

struct Split {
    blocks: Vec<(Vec<Vec<i64>>, Vec<usize>, Vec<i64>)>,
}

fn split(m: &Matrix, cap: usize) -> Result<Split> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("graph canonicalization of a {}x{} matrix", m.rows(), m.cols())));
    }
    let g = integer_entries(m)?;
    let n = g.len();
    if (0..n).any(|i| (0..n).any(|j| g[i][j] != g[j][i])) {
        return Err(Error::NotSymmetric);
    }
    let mut blocks = Vec::new();
    for comp in components(&g) {
        if comp.len() > cap {
            return Err(Error::SizeCapExceeded { size: comp.len(), cap });
        }
        let sub: Vec<Vec<i64>> = comp.iter().map(|&i| comp.iter().map(|&j| g[i][j]).collect()).collect();
        let (canon, perm, signs) = canonical_component(&sub);
        let global: Vec<usize> = perm.iter().map(|&p| comp[p]).collect();
        blocks.push((canon, global, signs));
    }
    Ok(Split { blocks })
}

/// Canonical multiset of connected signed-graph components.
pub fn herm_integer_canonical(m: &Matrix, cap: usize) -> Result<BlockMultiset> {
    Ok(split(m, cap)?.blocks.into_iter().map(|(c, _, _)| Block::GraphComponent(c)).collect())
}

/// `M = V S Vᵀ` with `V` a signed permutation.
pub fn spectral(m: &Matrix, opts: &Options) -> Result<Factorization> {
    let s = split(m, opts.integer_cap)?;
    let n = m.rows();
    let mut v = Matrix::zeros(RingId::IntegerTrivial, n, n);
    let mut placements = Vec::new();
    let mut col = 0;
    for (canon, global, signs) in s.blocks {
        let k = canon.len();
        for t in 0..k {
            v.set(global[t], col + t, Scalar::Integer(signs[t]));
        }
        placements.push(Placement::diag(Block::GraphComponent(canon), (col..col + k).collect()));
        col += k;
    }
    assemble(m, DecompKind::Spectral, v.clone(), v, placements)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: usize, v: &[i64]) -> Matrix {
        Matrix::from_fn(RingId::IntegerTrivial, n, n, |i, j| Scalar::Integer(v[i * n + j]))
    }

    #[test]
    fn single_edge() {
        let b = herm_integer_canonical(&int(2, &[0, 1, 1, 0]), 8).unwrap();
        assert_eq!(b.items(), &[Block::GraphComponent(vec![vec![0, 1], vec![1, 0]])]);
        let b = herm_integer_canonical(&int(2, &[0, -1, -1, 0]), 8).unwrap();
        assert_eq!(b.items(), &[Block::GraphComponent(vec![vec![0, 1], vec![1, 0]])]);
    }

    #[test]
    fn split_edge_and_loop() {
        let b = herm_integer_canonical(&int(3, &[0, 1, 0, 1, 0, 0, 0, 0, 7]), 8).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.items().contains(&Block::GraphComponent(vec![vec![7]])));
    }

    #[test]
    fn relabeled_path() {
        let p3 = int(3, &[0, 1, 0, 1, 0, 1, 0, 1, 0]);
        let q3 = int(3, &[0, 0, 1, 0, 0, -1, 1, -1, 0]);
        assert_eq!(herm_integer_canonical(&p3, 8).unwrap(), herm_integer_canonical(&q3, 8).unwrap());
    }

    #[test]
    fn order_key() {
        let mut v = vec![2, -1, 0, 1, -2];
        v.sort_by(|a, b| cmp_entry(*a, *b));
        assert_eq!(v, vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn cap_and_symmetry() {
        assert_eq!(herm_integer_canonical(&int(2, &[0, 1, 2, 0]), 8), Err(Error::NotSymmetric));
        let path = Matrix::from_fn(RingId::IntegerTrivial, 9, 9, |i, j| Scalar::Integer((i.abs_diff(j) == 1) as i64));
        assert_eq!(
            herm_integer_canonical(&path, 8),
            Err(Error::SizeCapExceeded { size: 9, cap: 8 })
        );
    }

    #[test]
    fn factorization_recombines_exactly() {
        let m = int(4, &[1, 0, -2, 0, 0, 0, 0, 3, -2, 0, 0, 0, 0, 3, 0, -1]);
        let f = spectral(&m, &Options::default()).unwrap();
        assert_eq!(f.residual, 0.0);
        assert!(f.left.is_unitary(0.0));
    }
}
