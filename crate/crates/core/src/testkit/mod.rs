//! Seeded samplers and verification oracles for the property suites.
//!
//! Every sampler is a pure function of `(ring, dims, seed)`; there is no
//! global generator state.

pub mod suite;

use num_complex::Complex64;

use crate::canonical::{is_generator, multiset_drift, BlockMultiset, DecompKind};
use crate::decomp::{decompose, Factorization, Options};
use crate::engines::dense::{norm, project_out, DMat};
use crate::engines::{from_dense, from_dual_parts, from_pair_parts, to_dense, RingElem};
use crate::error::{Error, Result};
use crate::matrices::Matrix;
use crate::scalars::{Dual, Quaternion, RingId, Scalar};

type C = Complex64;

/// Parameter tolerance used when comparing block multisets of related
/// matrices.
pub const MATCH_TOL: f64 = 1e-6;

/// Condition number bound for random invertible complex matrices: singular
/// values lie in `[1/√COND, √COND]`.
pub const COND: f64 = 8.0;

/// SplitMix64. Constants are the published ones, so streams are portable.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }

    /// Standard normal (Box–Muller).
    pub fn gauss(&mut self) -> f64 {
        let u = 1.0 - self.unit();
        let v = self.unit();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    }

    /// A fresh seed for a derived stream.
    pub fn fork(&mut self) -> u64 {
        self.next_u64()
    }
}

fn scalar_with(ring: RingId, rng: &mut Rng, mut f: impl FnMut(&mut Rng) -> f64) -> Scalar {
    match ring {
        RingId::Zero => Scalar::Zero,
        RingId::Real => Scalar::Real(f(rng)),
        RingId::Complex => Scalar::Complex(C::new(f(rng), f(rng))),
        RingId::DualTrivial => Scalar::DualTrivial(Dual::new(f(rng), f(rng))),
        RingId::DualConj => Scalar::DualConj(Dual::new(f(rng), f(rng))),
        RingId::Quaternion => Scalar::Quaternion(Quaternion::new(f(rng), f(rng), f(rng), f(rng))),
        RingId::DoubleComplexSwap => Scalar::DoubleComplex(C::new(f(rng), f(rng)), C::new(f(rng), f(rng))),
        RingId::IntegerTrivial => Scalar::Integer(rng.int(-3, 3)),
    }
}

fn fill(ring: RingId, m: usize, n: usize, rng: &mut Rng, f: impl Fn(&mut Rng) -> f64 + Copy) -> Matrix {
    let entries: Vec<Scalar> = (0..m * n).map(|_| scalar_with(ring, rng, f)).collect();
    Matrix::new(ring, m, n, entries).expect("sizes agree")
}

/// Entries with every real component uniform in `[−1, 1]` (integers in
/// `−3..=3`).
pub fn random_matrix(ring: RingId, m: usize, n: usize, seed: u64) -> Matrix {
    fill(ring, m, n, &mut Rng::new(seed), |r| r.uniform(-1.0, 1.0))
}

/// `(X + X*)/2` for a [`random_matrix`] `X`; integer samples are symmetric
/// with entries in `−3..=3`.
pub fn random_hermitian(ring: RingId, n: usize, seed: u64) -> Matrix {
    let x = random_matrix(ring, n, n, seed);
    if ring == RingId::IntegerTrivial {
        return Matrix::from_fn(ring, n, n, |i, j| if i <= j { x.get(i, j) } else { x.get(j, i) });
    }
    x.add(&x.adjoint()).expect("same shape").scale_real(0.5)
}

fn gauss_dense<T: RingElem>(n: usize, rng: &mut Rng) -> DMat<T> {
    let m = fill(T::RING, n, n, rng, Rng::gauss);
    to_dense::<T>(&m).expect("ring matches")
}

/// Orthonormalized Gaussian sample; retried on the (measure-zero) rank
/// deficient draw.
fn haar_like<T: RingElem>(n: usize, rng: &mut Rng) -> DMat<T> {
    loop {
        let g = gauss_dense::<T>(n, rng);
        let mut cols: Vec<Vec<T>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = g.column(j);
            project_out(&mut v, &cols);
            let nv = norm(&v);
            if nv <= 1e-6 {
                break;
            }
            cols.push(v.iter().map(|x| x.scale(1.0 / nv)).collect());
        }
        if cols.len() == n {
            return DMat::from_columns(n, &cols);
        }
    }
}

/// `(G + sign·Gᵀ)/2` for uniform `G`.
fn sym_or_antisym(n: usize, rng: &mut Rng, sign: f64) -> DMat<f64> {
    let mut g = DMat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = rng.uniform(-1.0, 1.0);
        }
    }
    g.add(&g.transpose().scale(sign)).scale(0.5)
}

/// `(P, P⁻¹)` with `P = W₁ D W₂`, `W` unitary and `D` positive diagonal with
/// condition number at most `cond`.
pub fn random_invertible(n: usize, seed: u64, cond: f64) -> (DMat<C>, DMat<C>) {
    let mut rng = Rng::new(seed);
    let w1 = haar_like::<C>(n, &mut rng);
    let w2 = haar_like::<C>(n, &mut rng);
    let half = cond.max(1.0).sqrt().ln();
    let d: Vec<f64> = (0..n).map(|_| rng.uniform(-half, half).exp()).collect();
    let dm = DMat::diag(&d.iter().map(|&x| C::new(x, 0.0)).collect::<Vec<_>>());
    let di = DMat::diag(&d.iter().map(|&x| C::new(1.0 / x, 0.0)).collect::<Vec<_>>());
    let p = w1.matmul(&dm).matmul(&w2);
    let pinv = w2.adjoint().matmul(&di).matmul(&w1.adjoint());
    (p, pinv)
}

/// A random unitary over `ring`.
///
/// ℝ, ℂ, ℍ: orthonormalized Gaussian. Dual trivial: `U₀(I + εK)` with `K`
/// antisymmetric. Dual conjugate: `(I + εS)U₀` with `S` symmetric.
/// ℂ ⊕ ℂ: `(P, P⁻ᵀ)` with `cond(P) ≤ COND`. ℤ: a signed permutation.
pub fn random_unitary(ring: RingId, n: usize, seed: u64) -> Matrix {
    let mut rng = Rng::new(seed);
    match ring {
        RingId::Zero => Matrix::identity(ring, n),
        RingId::Real => from_dense(&haar_like::<f64>(n, &mut rng)),
        RingId::Complex => from_dense(&haar_like::<C>(n, &mut rng)),
        RingId::Quaternion => from_dense(&haar_like::<Quaternion>(n, &mut rng)),
        RingId::DualTrivial => {
            let u0 = haar_like::<f64>(n, &mut rng);
            let k = sym_or_antisym(n, &mut rng, -1.0);
            from_dual_parts(ring, &u0, &u0.matmul(&k))
        }
        RingId::DualConj => {
            let u0 = haar_like::<f64>(n, &mut rng);
            let s = sym_or_antisym(n, &mut rng, 1.0);
            from_dual_parts(ring, &u0, &s.matmul(&u0))
        }
        RingId::DoubleComplexSwap => {
            let (p, pinv) = random_invertible(n, rng.fork(), COND);
            from_pair_parts(&p, &pinv.transpose())
        }
        RingId::IntegerTrivial => {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.below(i + 1));
            }
            let signs: Vec<i64> = (0..n).map(|_| if rng.below(2) == 0 { 1 } else { -1 }).collect();
            Matrix::from_fn(ring, n, n, |i, j| Scalar::Integer(if perm[j] == i { signs[j] } else { 0 }))
        }
    }
}

/// A random member of the equivalence class of `m` for `kind`: `U M V*`,
/// `V M V*` or `P M P⁻¹`.
pub fn sandwich(m: &Matrix, kind: DecompKind, seed: u64) -> Result<Matrix> {
    let mut rng = Rng::new(seed);
    let (rows, cols) = m.shape();
    match kind {
        DecompKind::Svd => {
            let u = random_unitary(m.ring(), rows, rng.fork());
            let v = random_unitary(m.ring(), cols, rng.fork());
            u.matmul(m)?.matmul(&v.adjoint())
        }
        DecompKind::Spectral => {
            let v = random_unitary(m.ring(), rows, rng.fork());
            v.matmul(m)?.matmul(&v.adjoint())
        }
        DecompKind::Jordan => {
            let (p, pinv) = random_invertible(rows, rng.fork(), COND);
            from_dense(&p).matmul(m)?.matmul(&from_dense(&pinv))
        }
    }
}

/// Outcome of [`verify_factorization`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub tol: f64,
    /// `‖recombine − M‖_max / (1 + ‖M‖_max)`.
    pub reconstruction: f64,
    /// Unitarity of `left` (or `left·right = I` for Jordan).
    pub left: f64,
    /// Unitarity of `right` (spectral also `right = left`; Jordan `right·left = I`).
    pub right: f64,
    pub shape_ok: bool,
    /// Generator membership, in block order.
    pub generators: Vec<bool>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.shape_ok {
            out.push("factor shapes do not match the matrix and blocks".to_string());
        }
        for (name, v) in [("reconstruction", self.reconstruction), ("left factor", self.left), ("right factor", self.right)] {
            if !(v <= self.tol) {
                out.push(format!("{name} residual {v:e} exceeds {:e}", self.tol));
            }
        }
        for (i, ok) in self.generators.iter().enumerate() {
            if !ok {
                out.push(format!("block {i} is not a generator"));
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

fn deviation_from_identity(p: Result<Matrix>) -> f64 {
    match p {
        Ok(p) if p.is_square() => p.max_diff(&Matrix::identity(p.ring(), p.rows())).unwrap_or(f64::INFINITY),
        _ => f64::INFINITY,
    }
}

fn unitarity(u: &Matrix) -> f64 {
    let a = u.adjoint();
    deviation_from_identity(u.matmul(&a)).max(deviation_from_identity(a.matmul(u)))
}

/// Checks reconstruction, factor unitarity (or inverse pairing) and block
/// membership. Never fails; problems are carried by the report.
pub fn verify_factorization(m: &Matrix, f: &Factorization, tol: f64) -> VerifyReport {
    let ring = m.ring();
    let (rows, cols) = m.shape();
    let (sr, sc) = f.blocks.iter().fold((0, 0), |(r, c), b| (r + b.shape().0, c + b.shape().1));
    let right_dim = if f.kind == DecompKind::Jordan { f.right.rows() } else { f.right.cols() };
    let shape_ok = f.left.ring() == ring
        && f.right.ring() == ring
        && f.left.shape() == (rows, sr)
        && right_dim == sc
        && f.right.shape() == (cols, cols);
    let (left, right) = if !shape_ok {
        (f64::INFINITY, f64::INFINITY)
    } else {
        match f.kind {
            DecompKind::Jordan => (
                deviation_from_identity(f.left.matmul(&f.right)),
                deviation_from_identity(f.right.matmul(&f.left)),
            ),
            DecompKind::Spectral => {
                (unitarity(&f.left), unitarity(&f.right).max(f.left.max_diff(&f.right).unwrap_or(f64::INFINITY)))
            }
            DecompKind::Svd => (unitarity(&f.left), unitarity(&f.right)),
        }
    };
    let reconstruction = if shape_ok { f.residual_against(m).unwrap_or(f64::INFINITY) } else { f64::INFINITY };
    let generators = f.blocks.iter().map(|b| is_generator(b, ring, f.kind).unwrap_or(false)).collect();
    VerifyReport { tol, reconstruction, left, right, shape_ok, generators }
}

fn blocks(m: &Matrix, kind: DecompKind, opts: &Options) -> Result<BlockMultiset> {
    Ok(decompose(m, kind, opts)?.blocks)
}

/// Largest parameter drift between the blocks of `m` and those of `trials`
/// random members of its class; infinite on a structural mismatch.
pub fn uniqueness_drift(m: &Matrix, kind: DecompKind, trials: usize, seed: u64, opts: &Options) -> Result<f64> {
    let base = blocks(m, kind, opts)?;
    let mut rng = Rng::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let s = sandwich(m, kind, rng.fork())?;
        let b = blocks(&s, kind, opts)?;
        worst = worst.max(multiset_drift(&base, &b).unwrap_or(f64::INFINITY));
    }
    Ok(worst)
}

/// True iff every sandwich of `m` has the same blocks within [`MATCH_TOL`].
pub fn uniqueness_probe(m: &Matrix, kind: DecompKind, trials: usize, seed: u64, opts: &Options) -> Result<bool> {
    Ok(uniqueness_drift(m, kind, trials, seed, opts)? <= MATCH_TOL)
}

/// `blocks(A ⊕ B)` against `blocks(A) ⊎ blocks(B)`: the drift, infinite on a
/// structural mismatch.
pub fn additivity_drift(a: &Matrix, b: &Matrix, kind: DecompKind, opts: &Options) -> Result<f64> {
    if a.ring() != b.ring() {
        return Err(Error::RingMismatch(a.ring(), b.ring()));
    }
    let whole = blocks(&a.direct_sum(b)?, kind, opts)?;
    let parts = blocks(a, kind, opts)?.union(&blocks(b, kind, opts)?);
    Ok(multiset_drift(&whole, &parts).unwrap_or(f64::INFINITY))
}

pub fn additivity_check(a: &Matrix, b: &Matrix, kind: DecompKind, opts: &Options) -> Result<bool> {
    Ok(additivity_drift(a, b, kind, opts)? <= MATCH_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::Block;

    #[test]
    fn splitmix_reference_stream() {
        // first outputs for seed 0, as published with the algorithm
        let mut r = Rng::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn samplers_are_deterministic() {
        for ring in RingId::ALL {
            assert_eq!(random_matrix(ring, 2, 3, 42), random_matrix(ring, 2, 3, 42));
            assert_eq!(random_unitary(ring, 3, 42), random_unitary(ring, 3, 42));
        }
        assert_eq!(random_matrix(RingId::Real, 0, 3, 1).shape(), (0, 3));
    }

    #[test]
    fn unitaries_are_unitary() {
        for ring in RingId::ALL {
            for n in 0..=8 {
                for seed in 0..3 {
                    let u = random_unitary(ring, n, seed);
                    assert!(unitarity(&u) <= 1e-10, "{ring} n={n}: {}", unitarity(&u));
                }
            }
        }
    }

    #[test]
    fn integer_unitary_is_signed_permutation() {
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..200 {
            let u = random_unitary(RingId::IntegerTrivial, 2, seed);
            seen.insert(format!("{u}"));
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn hermitian_samples() {
        for ring in RingId::ALL {
            for seed in 0..100 {
                assert!(random_hermitian(ring, 3, seed).is_hermitian(0.0), "{ring}");
            }
        }
    }

    #[test]
    fn verify_accepts_and_rejects() {
        let m = Matrix::from_reals(RingId::Complex, 2, 3, &[1.0, 2.0, 0.0, 2.0, 1.0, 0.0]);
        let mut f = decompose(&m, DecompKind::Svd, &Options::default()).unwrap();
        assert!(verify_factorization(&m, &f, 1e-8).passed());
        let bump = Matrix::from_fn(RingId::Complex, 2, 2, |i, j| Scalar::from_real(RingId::Complex, if i == j { 1e-3 } else { 0.0 }));
        f.left = f.left.add(&bump).unwrap();
        let r = verify_factorization(&m, &f, 1e-8);
        assert!(!r.passed() && r.left > 1e-8);
        let z = Matrix::zeros(RingId::Real, 0, 0);
        let fz = decompose(&z, DecompKind::Svd, &Options::default()).unwrap();
        assert!(verify_factorization(&z, &fz, 1e-8).passed());
    }

    #[test]
    fn uniqueness_examples() {
        let opts = Options::default();
        let m = Matrix::from_reals(RingId::Complex, 2, 3, &[1.0, 2.0, 0.0, 2.0, 1.0, 0.0]);
        assert!(uniqueness_probe(&m, DecompKind::Svd, 50, 7, &opts).unwrap());
        let d = |re, eps| Scalar::DualConj(Dual::new(re, eps));
        let rot = Matrix::new(RingId::DualConj, 2, 2, vec![d(1.0, 0.0), d(0.0, -1.0), d(0.0, 1.0), d(1.0, 0.0)]).unwrap();
        assert!(uniqueness_probe(&rot, DecompKind::Spectral, 50, 7, &opts).unwrap());
        // scaling changes the class
        let b1 = decompose(&m, DecompKind::Svd, &opts).unwrap().blocks;
        let b2 = decompose(&m.scale_real(2.0), DecompKind::Svd, &opts).unwrap().blocks;
        assert!(!crate::canonical::multiset_eq(&b1, &b2, MATCH_TOL));
    }

    #[test]
    fn additivity_examples() {
        let opts = Options::default();
        let a = Matrix::from_reals(RingId::Complex, 1, 1, &[3.0]);
        let b = Matrix::zeros(RingId::Complex, 0, 1);
        assert!(additivity_check(&a, &b, DecompKind::Svd, &opts).unwrap());
        let whole = decompose(&a.direct_sum(&b).unwrap(), DecompKind::Svd, &opts).unwrap();
        assert_eq!(whole.blocks.items(), &[Block::PosScalar(3.0), Block::EmptyCol]);
        let i1 = Matrix::identity(RingId::Real, 1);
        assert!(additivity_check(&i1, &i1, DecompKind::Spectral, &opts).unwrap());
        for seed in 0..100 {
            let a = random_matrix(RingId::DualTrivial, 2, 3, seed);
            let b = random_matrix(RingId::DualTrivial, 2, 1, seed + 1000);
            assert!(additivity_check(&a, &b, DecompKind::Svd, &opts).unwrap(), "seed {seed}");
        }
    }
}
