//! The invariant suite run by `selftest` and the acceptance target.
//!
//! Each cell is a `(ring, kind, property)` triple evaluated on seeded random
//! trials. Refusals ([`Error::ClusterAmbiguity`], [`Error::NoConvergence`])
//! are resampled and counted; any other error or a drift above tolerance is
//! a failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use itertools::Itertools;
use num_complex::Complex64;

use super::{additivity_drift, random_hermitian, random_invertible, random_matrix, sandwich, uniqueness_drift, Rng, MATCH_TOL};
use crate::canonical::{check_supported, multiset_drift, Block, BlockMultiset, DecompKind};
use crate::decomp::{bordered_image, decompose, jordan, pair_embedding, spectral, svd, Options};
use crate::engines::jordan::eigenvalues;
use crate::engines::{from_dense, to_dense};
use crate::error::{Error, Result};
use crate::matrices::Matrix;
use crate::scalars::{RingId, Scalar};

/// Cells fail when more than this fraction of draws is refused.
pub const MAX_REFUSAL_RATE: f64 = 0.2;

/// Draws per trial before a trial counts as failed.
pub const MAX_RESAMPLES: usize = 10;

/// Largest dimension of random suite inputs.
pub const MAX_DIM: usize = 5;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    /// Restricts the suite to these rings; `None` runs all of them.
    pub rings: Option<Vec<RingId>>,
    pub opts: Options,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { trials: 50, seed: 7, rings: None, opts: Options::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub ring: RingId,
    pub kind: DecompKind,
    pub property: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub refusals: usize,
    /// Largest drift over accepted trials.
    pub worst: f64,
    pub first_failure: Option<String>,
}

impl CellResult {
    pub fn refusal_rate(&self) -> f64 {
        let draws = self.trials - self.failures + self.refusals;
        if draws == 0 {
            0.0
        } else {
            self.refusals as f64 / draws as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.refusal_rate() < MAX_REFUSAL_RATE
    }
}

pub fn is_refusal(e: &Error) -> bool {
    matches!(e, Error::ClusterAmbiguity { .. } | Error::NoConvergence)
}

/// Runs `trial` on `trials` fresh seeds. A trial passes when it returns a
/// drift at most `tol`.
pub fn run_cell(
    ring: RingId,
    kind: DecompKind,
    property: &'static str,
    trials: usize,
    seed: u64,
    tol: f64,
    mut trial: impl FnMut(u64) -> Result<f64>,
) -> CellResult {
    let mut rng = Rng::new(seed);
    let mut out = CellResult { ring, kind, property, trials, failures: 0, refusals: 0, worst: 0.0, first_failure: None };
    for t in 0..trials {
        let mut outcome = None;
        for _ in 0..MAX_RESAMPLES {
            let s = rng.fork();
            match trial(s) {
                Ok(d) => {
                    outcome = Some(if d <= tol { Ok(d) } else { Err(format!("trial {t} (seed {s}): drift {d:e} > {tol:e}")) });
                    break;
                }
                Err(e) if is_refusal(&e) => out.refusals += 1,
                Err(e) => {
                    outcome = Some(Err(format!("trial {t} (seed {s}): {e}")));
                    break;
                }
            }
        }
        match outcome.unwrap_or_else(|| Err(format!("trial {t}: refused {MAX_RESAMPLES} times"))) {
            Ok(d) => out.worst = out.worst.max(d),
            Err(msg) => {
                out.failures += 1;
                out.first_failure.get_or_insert(msg);
            }
        }
    }
    out
}

/// All supported `(ring, kind)` pairs.
pub fn in_scope() -> Vec<(RingId, DecompKind)> {
    RingId::ALL
        .iter()
        .flat_map(|&r| DecompKind::ALL.iter().map(move |&k| (r, k)))
        .filter(|&(r, k)| check_supported(r, k).is_ok())
        .collect()
}

/// A random valid input for `kind`: any shape for SVD, self-adjoint for
/// spectral, square for Jordan. Dimensions are at most [`MAX_DIM`].
pub fn random_input(ring: RingId, kind: DecompKind, seed: u64) -> Matrix {
    let mut rng = Rng::new(seed);
    let a = rng.below(MAX_DIM + 1);
    let b = rng.below(MAX_DIM + 1);
    let s = rng.fork();
    match kind {
        DecompKind::Svd => random_matrix(ring, a, b, s),
        DecompKind::Spectral => random_hermitian(ring, a, s),
        DecompKind::Jordan => random_matrix(ring, a, a, s),
    }
}

fn drift(a: &BlockMultiset, b: &BlockMultiset) -> f64 {
    multiset_drift(a, b).unwrap_or(f64::INFINITY)
}

/// Rings with a bordered-matrix pairing of SVD and spectral blocks.
pub const BORDERED_RINGS: [RingId; 5] =
    [RingId::Real, RingId::Complex, RingId::DualTrivial, RingId::DualConj, RingId::Quaternion];

/// Shapes cycled through by the bordered check.
pub const BORDERED_SHAPES: [(usize, usize); 4] = [(3, 3), (4, 2), (2, 4), (3, 0)];

/// `spectral([[0, M*], [M, 0]])` against the paired image of `svd(M)`.
pub fn bordered_trial(ring: RingId, shape: (usize, usize), seed: u64, opts: &Options) -> Result<f64> {
    let m = random_matrix(ring, shape.0, shape.1, seed);
    let image = bordered_image(&svd(&m, opts)?.blocks, ring)?;
    let direct = spectral(&m.bordered(), opts)?.blocks;
    Ok(drift(&direct, &image))
}

/// Smallest distance between eigenvalues of a square complex matrix.
pub fn eigenvalue_separation(a: &Matrix) -> Result<f64> {
    let vals = eigenvalues(&to_dense::<Complex64>(a)?)?;
    Ok(vals.iter().tuple_combinations().map(|(x, y)| (x - y).norm()).fold(f64::INFINITY, f64::min))
}

/// The pair-embedding image of a Jordan block `(m, λ)`.
pub fn pair_image(b: &Block) -> Block {
    match b {
        Block::JordanBlock { m, lambda } => {
            let r = lambda.norm();
            let theta = if r == 0.0 { 0.0 } else { crate::canonical::reduce_angle(lambda.arg(), 2.0 * std::f64::consts::PI) };
            Block::JordanPair { m: *m, r, theta }
        }
        other => other.clone(),
    }
}

/// `jordan(A)` against `spectral((A, Aᵀ))` for random complex `A` with
/// eigenvalue separation at least `1e-3` (resampled until it holds).
pub fn pair_bijection_trial(seed: u64, opts: &Options) -> Result<f64> {
    let mut rng = Rng::new(seed);
    let n = 1 + rng.below(MAX_DIM);
    let a = loop {
        let a = random_matrix(RingId::Complex, n, n, rng.fork());
        if eigenvalue_separation(&a)? >= 1e-3 {
            break a;
        }
    };
    let j: BlockMultiset = jordan(&a, opts)?.blocks.iter().map(pair_image).collect();
    let s = spectral(&pair_embedding(&a)?, opts)?.blocks;
    Ok(drift(&j, &s))
}

/// A sparse random signed graph with loops: edges with probability 0.4,
/// loops with probability 0.3, weights in `±1, ±2`.
pub fn signed_graph(n: usize, seed: u64) -> Matrix {
    let mut rng = Rng::new(seed);
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let p = if i == j { 0.3 } else { 0.4 };
            if rng.unit() < p {
                let w = [1, -1, 2, -2][rng.below(4)];
                g[i][j] = w;
                g[j][i] = w;
            }
        }
    }
    Matrix::from_fn(RingId::IntegerTrivial, n, n, |i, j| Scalar::Integer(g[i][j]))
}

fn int_entries(m: &Matrix) -> Vec<Vec<i64>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| match m.get(i, j) {
                    Scalar::Integer(v) => v,
                    other => panic!("integer matrix expected, found {other}"),
                })
                .collect()
        })
        .collect()
}

/// Exhaustive test for `B = S P A Pᵀ S` with `P` a permutation and `S` a
/// diagonal sign matrix.
pub fn brute_force_isomorphic(a: &Matrix, b: &Matrix) -> bool {
    let (x, y) = (int_entries(a), int_entries(b));
    let n = x.len();
    if y.len() != n {
        return false;
    }
    (0..n).permutations(n).any(|p| {
        (0u32..1 << n).any(|mask| {
            let s = |i: usize| if mask >> i & 1 == 1 { -1 } else { 1 };
            (0..n).all(|i| (0..n).all(|j| s(i) * s(j) * x[p[i]][p[j]] == y[i][j]))
        })
    })
}

/// Canonical forms agree exactly iff the brute-force oracle says the graphs
/// are isomorphic; both directions are checked. Returns 0 on agreement.
pub fn graph_trial(seed: u64, opts: &Options) -> Result<f64> {
    let mut rng = Rng::new(seed);
    let n = 1 + rng.below(6);
    let g = signed_graph(n, rng.fork());
    let h = if rng.below(2) == 0 { sandwich(&g, DecompKind::Spectral, rng.fork())? } else { signed_graph(n, rng.fork()) };
    let (bg, bh) = (spectral(&g, opts)?.blocks, spectral(&h, opts)?.blocks);
    Ok(if (bg == bh) == brute_force_isomorphic(&g, &h) { 0.0 } else { f64::INFINITY })
}

/// A planted Jordan instance `P J P⁻¹`: its matrix and the blocks of `J`.
/// Eigenvalues lie in the unit disc with pairwise separation at least
/// `1e-3`; `cond(P) ≤ cond`.
pub fn planted_jordan(seed: u64, max_n: usize, cond: f64) -> (Matrix, BlockMultiset) {
    let mut rng = Rng::new(seed);
    let n = 1 + rng.below(max_n);
    // random composition of n into clusters, then each cluster into blocks
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let k = 1 + rng.below(left);
        sizes.push(k);
        left -= k;
    }
    let eig: Vec<Complex64> = loop {
        let v: Vec<Complex64> = sizes
            .iter()
            .map(|_| Complex64::from_polar(rng.unit().sqrt(), rng.uniform(0.0, 2.0 * std::f64::consts::PI)))
            .collect();
        if v.iter().tuple_combinations().all(|(a, b)| (a - b).norm() >= 1e-3) {
            break v;
        }
    };
    let mut blocks = Vec::new();
    for (&k, &lambda) in sizes.iter().zip(&eig) {
        let mut rest = k;
        while rest > 0 {
            let m = 1 + rng.below(rest);
            blocks.push(Block::JordanBlock { m, lambda });
            rest -= m;
        }
    }
    let blocks = BlockMultiset::new(blocks);
    let j = crate::canonical::materialize(&blocks, RingId::Complex).expect("complex Jordan blocks materialize");
    let (p, pinv) = random_invertible(n, rng.fork(), cond);
    let m = from_dense(&p).matmul(&j).and_then(|x| x.matmul(&from_dense(&pinv))).expect("square");
    (m, blocks)
}

/// Block sizes grouped by eigenvalue, each group sorted; groups sorted.
pub fn segre_signature(blocks: &BlockMultiset, tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<(Complex64, Vec<usize>)> = Vec::new();
    for b in blocks {
        if let Block::JordanBlock { m, lambda } = b {
            match groups.iter_mut().find(|(l, _)| (*l - lambda).norm() <= tol) {
                Some((_, v)) => v.push(*m),
                None => groups.push((*lambda, vec![*m])),
            }
        }
    }
    let mut out: Vec<Vec<usize>> = groups
        .into_iter()
        .map(|(_, mut v)| {
            v.sort_unstable();
            v
        })
        .collect();
    out.sort();
    out
}

/// Runs every property for every selected in-scope cell.
pub fn selftest(cfg: &SuiteConfig) -> Vec<CellResult> {
    let opts = cfg.opts;
    let selected = |r: RingId| cfg.rings.as_ref().map_or(true, |rs| rs.contains(&r));
    let mut out = Vec::new();
    let mut seeds = Rng::new(cfg.seed);
    for (ring, kind) in in_scope().into_iter().filter(|&(r, _)| selected(r)) {
        let n = cfg.trials;
        out.push(run_cell(ring, kind, "additivity", n, seeds.fork(), MATCH_TOL, |s| {
            let mut r = Rng::new(s);
            let a = random_input(ring, kind, r.fork());
            let b = random_input(ring, kind, r.fork());
            additivity_drift(&a, &b, kind, &opts)
        }));
        out.push(run_cell(ring, kind, "uniqueness", n, seeds.fork(), MATCH_TOL, |s| {
            let mut r = Rng::new(s);
            let m = random_input(ring, kind, r.fork());
            uniqueness_drift(&m, kind, 1, r.fork(), &opts)
        }));
        if kind == DecompKind::Svd && BORDERED_RINGS.contains(&ring) {
            let mut shape = BORDERED_SHAPES.iter().cycle();
            out.push(run_cell(ring, kind, "bordered", n, seeds.fork(), MATCH_TOL, |s| {
                bordered_trial(ring, *shape.next().expect("cycle"), s, &opts)
            }));
        }
        if ring == RingId::Complex && kind == DecompKind::Jordan {
            out.push(run_cell(ring, kind, "pair-bijection", n, seeds.fork(), MATCH_TOL, |s| pair_bijection_trial(s, &opts)));
        }
        if ring == RingId::IntegerTrivial {
            out.push(run_cell(ring, kind, "graph-isomorphism", n, seeds.fork(), 0.0, |s| graph_trial(s, &opts)));
        }
    }
    out
}

/// A pass/fail matrix: one row per `(ring, kind)`, one column per property.
pub fn render(results: &[CellResult]) -> String {
    let props: Vec<&str> = results.iter().map(|r| r.property).unique().collect();
    let mut rows: BTreeMap<(RingId, DecompKind), BTreeMap<&str, &CellResult>> = BTreeMap::new();
    for r in results {
        rows.entry((r.ring, r.kind)).or_default().insert(r.property, r);
    }
    let mut s = String::new();
    let _ = write!(s, "{:<24}", "ring/kind");
    for p in &props {
        let _ = write!(s, " {p:>18}");
    }
    s.push('\n');
    for ((ring, kind), cells) in &rows {
        let _ = write!(s, "{:<24}", format!("{ring}/{kind}"));
        for p in &props {
            let cell = match cells.get(p) {
                None => "-".to_string(),
                Some(c) if c.passed() => format!("pass ({}r)", c.refusals),
                Some(c) => format!("FAIL {}/{}", c.failures, c.trials),
            };
            let _ = write!(s, " {cell:>18}");
        }
        s.push('\n');
    }
    for r in results.iter().filter(|r| !r.passed()) {
        let why = r.first_failure.clone().unwrap_or_else(|| format!("refusal rate {:.2}", r.refusal_rate()));
        let _ = writeln!(s, "{}/{}/{}: {why}", r.ring, r.kind, r.property);
    }
    s
}

/// Runs `decompose` and reports whether it was refused.
pub fn refused(m: &Matrix, kind: DecompKind, opts: &Options) -> bool {
    matches!(decompose(m, kind, opts), Err(ref e) if is_refusal(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_pass_vacuously() {
        let cfg = SuiteConfig { trials: 0, ..SuiteConfig::default() };
        let res = selftest(&cfg);
        assert!(!res.is_empty() && res.iter().all(CellResult::passed));
    }

    #[test]
    fn ring_filter() {
        let cfg = SuiteConfig { trials: 3, rings: Some(vec![RingId::IntegerTrivial]), ..SuiteConfig::default() };
        let res = selftest(&cfg);
        assert!(res.iter().all(|r| r.ring == RingId::IntegerTrivial));
        assert!(res.iter().any(|r| r.property == "graph-isomorphism"));
        assert!(res.iter().all(CellResult::passed), "{}", render(&res));
    }

    #[test]
    fn oracle_detects_relabeling() {
        let g = signed_graph(4, 3);
        let h = sandwich(&g, DecompKind::Spectral, 9).unwrap();
        assert!(brute_force_isomorphic(&g, &h));
        let path = Matrix::from_fn(RingId::IntegerTrivial, 3, 3, |i, j| Scalar::Integer((i.abs_diff(j) == 1) as i64));
        let tri = Matrix::from_fn(RingId::IntegerTrivial, 3, 3, |i, j| Scalar::Integer((i != j) as i64));
        assert!(!brute_force_isomorphic(&path, &tri));
    }

    #[test]
    fn planted_instances_are_consistent() {
        for seed in 0..20 {
            let (m, blocks) = planted_jordan(seed, 6, 100.0);
            let total: usize = blocks.iter().map(Block::size).sum();
            assert_eq!(m.shape(), (total, total));
        }
    }
}
