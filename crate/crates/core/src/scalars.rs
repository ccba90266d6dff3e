//! Scalars of the supported *-rings.
//!
//! Every [`Scalar`] carries its ring in the variant tag, so the involution is
//! always known. Dual numbers come in two flavours that share a carrier but
//! differ in the involution: trivial (`z* = z`) and conjugate
//! (`(a + bε)* = a − bε`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A *-ring: carrier plus involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingId {
    Zero,
    Real,
    Complex,
    DualTrivial,
    DualConj,
    Quaternion,
    DoubleComplexSwap,
    IntegerTrivial,
}

impl RingId {
    pub const ALL: [RingId; 8] = [
        RingId::Zero,
        RingId::Real,
        RingId::Complex,
        RingId::DualTrivial,
        RingId::DualConj,
        RingId::Quaternion,
        RingId::DoubleComplexSwap,
        RingId::IntegerTrivial,
    ];

    /// Name used on the command line and in JSON files.
    pub fn name(self) -> &'static str {
        match self {
            RingId::Zero => "zero",
            RingId::Real => "real",
            RingId::Complex => "complex",
            RingId::DualTrivial => "dual-trivial",
            RingId::DualConj => "dual-conj",
            RingId::Quaternion => "quaternion",
            RingId::DoubleComplexSwap => "double-complex",
            RingId::IntegerTrivial => "integer",
        }
    }

    pub fn is_dual(self) -> bool {
        matches!(self, RingId::DualTrivial | RingId::DualConj)
    }
}

impl fmt::Display for RingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RingId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RingId::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown ring '{s}'")))
    }
}

/// A dual number `re + eps·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub fn new(re: f64, eps: f64) -> Self {
        Dual { re, eps }
    }
}

/// Hamilton quaternion `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Symplectic split `q = z1 + z2 j` with `z1 = w + x i`, `z2 = y + z i`.
    pub fn to_pair(self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, self.z))
    }

    pub fn from_pair(z1: Complex64, z2: Complex64) -> Self {
        Quaternion::new(z1.re, z1.im, z2.re, z2.im)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

/// A value in one of the supported *-rings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Zero,
    Real(f64),
    Complex(Complex64),
    DualTrivial(Dual),
    DualConj(Dual),
    Quaternion(Quaternion),
    /// The pair `(a, c)` in ℂ ⊕ ℂ with swap involution.
    DoubleComplex(Complex64, Complex64),
    Integer(i64),
}

impl Scalar {
    pub fn ring(&self) -> RingId {
        match self {
            Scalar::Zero => RingId::Zero,
            Scalar::Real(_) => RingId::Real,
            Scalar::Complex(_) => RingId::Complex,
            Scalar::DualTrivial(_) => RingId::DualTrivial,
            Scalar::DualConj(_) => RingId::DualConj,
            Scalar::Quaternion(_) => RingId::Quaternion,
            Scalar::DoubleComplex(..) => RingId::DoubleComplexSwap,
            Scalar::Integer(_) => RingId::IntegerTrivial,
        }
    }

    pub fn zero(ring: RingId) -> Scalar {
        Scalar::from_int(ring, 0)
    }

    pub fn one(ring: RingId) -> Scalar {
        Scalar::from_int(ring, 1)
    }

    pub fn from_int(ring: RingId, n: i64) -> Scalar {
        match ring {
            RingId::IntegerTrivial => Scalar::Integer(n),
            _ => Scalar::from_real(ring, n as f64),
        }
    }

    /// Embeds a real number. For the integer ring the value is rounded.
    pub fn from_real(ring: RingId, x: f64) -> Scalar {
        match ring {
            RingId::Zero => Scalar::Zero,
            RingId::Real => Scalar::Real(x),
            RingId::Complex => Scalar::Complex(Complex64::new(x, 0.0)),
            RingId::DualTrivial => Scalar::DualTrivial(Dual::new(x, 0.0)),
            RingId::DualConj => Scalar::DualConj(Dual::new(x, 0.0)),
            RingId::Quaternion => Scalar::Quaternion(Quaternion::new(x, 0.0, 0.0, 0.0)),
            RingId::DoubleComplexSwap => {
                Scalar::DoubleComplex(Complex64::new(x, 0.0), Complex64::new(x, 0.0))
            }
            RingId::IntegerTrivial => Scalar::Integer(x.round() as i64),
        }
    }

    /// The involution `*`.
    pub fn conj(&self) -> Scalar {
        match *self {
            Scalar::Zero => Scalar::Zero,
            Scalar::Real(a) => Scalar::Real(a),
            Scalar::Complex(z) => Scalar::Complex(z.conj()),
            Scalar::DualTrivial(d) => Scalar::DualTrivial(d),
            Scalar::DualConj(d) => Scalar::DualConj(Dual::new(d.re, -d.eps)),
            Scalar::Quaternion(q) => Scalar::Quaternion(q.conj()),
            Scalar::DoubleComplex(a, c) => Scalar::DoubleComplex(c, a),
            Scalar::Integer(n) => Scalar::Integer(n),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        Ok(match (*self, *other) {
            (Scalar::Zero, Scalar::Zero) => Scalar::Zero,
            (Scalar::Real(a), Scalar::Real(b)) => Scalar::Real(a + b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a + b),
            (Scalar::DualTrivial(a), Scalar::DualTrivial(b)) => {
                Scalar::DualTrivial(Dual::new(a.re + b.re, a.eps + b.eps))
            }
            (Scalar::DualConj(a), Scalar::DualConj(b)) => {
                Scalar::DualConj(Dual::new(a.re + b.re, a.eps + b.eps))
            }
            (Scalar::Quaternion(a), Scalar::Quaternion(b)) => Scalar::Quaternion(a + b),
            (Scalar::DoubleComplex(a, c), Scalar::DoubleComplex(b, d)) => {
                Scalar::DoubleComplex(a + b, c + d)
            }
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a + b),
            (x, y) => return Err(Error::RingMismatch(x.ring(), y.ring())),
        })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        Ok(match (*self, *other) {
            (Scalar::Zero, Scalar::Zero) => Scalar::Zero,
            (Scalar::Real(a), Scalar::Real(b)) => Scalar::Real(a * b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a * b),
            (Scalar::DualTrivial(a), Scalar::DualTrivial(b)) => Scalar::DualTrivial(dual_mul(a, b)),
            (Scalar::DualConj(a), Scalar::DualConj(b)) => Scalar::DualConj(dual_mul(a, b)),
            (Scalar::Quaternion(a), Scalar::Quaternion(b)) => Scalar::Quaternion(a * b),
            (Scalar::DoubleComplex(a, c), Scalar::DoubleComplex(b, d)) => {
                Scalar::DoubleComplex(a * b, c * d)
            }
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a * b),
            (x, y) => return Err(Error::RingMismatch(x.ring(), y.ring())),
        })
    }

    pub fn neg(&self) -> Scalar {
        match *self {
            Scalar::Zero => Scalar::Zero,
            Scalar::Real(a) => Scalar::Real(-a),
            Scalar::Complex(z) => Scalar::Complex(-z),
            Scalar::DualTrivial(d) => Scalar::DualTrivial(Dual::new(-d.re, -d.eps)),
            Scalar::DualConj(d) => Scalar::DualConj(Dual::new(-d.re, -d.eps)),
            Scalar::Quaternion(q) => Scalar::Quaternion(-q),
            Scalar::DoubleComplex(a, c) => Scalar::DoubleComplex(-a, -c),
            Scalar::Integer(n) => Scalar::Integer(-n),
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Scalar> {
        match *self {
            Scalar::Zero => Err(Error::NotInvertible),
            Scalar::Real(a) if a != 0.0 => Ok(Scalar::Real(1.0 / a)),
            Scalar::Complex(z) if z.norm_sqr() != 0.0 => Ok(Scalar::Complex(z.inv())),
            Scalar::DualTrivial(d) if d.re != 0.0 => Ok(Scalar::DualTrivial(dual_inv(d))),
            Scalar::DualConj(d) if d.re != 0.0 => Ok(Scalar::DualConj(dual_inv(d))),
            Scalar::Quaternion(q) if q.norm_sqr() != 0.0 => {
                Ok(Scalar::Quaternion(q.conj().scale(1.0 / q.norm_sqr())))
            }
            Scalar::DoubleComplex(a, c) if a.norm_sqr() != 0.0 && c.norm_sqr() != 0.0 => {
                Ok(Scalar::DoubleComplex(a.inv(), c.inv()))
            }
            Scalar::Integer(n) if n == 1 || n == -1 => Ok(Scalar::Integer(n)),
            _ => Err(Error::NotInvertible),
        }
    }

    /// Real components in a fixed order (see the JSON encoding).
    pub fn components(&self) -> Vec<f64> {
        match *self {
            Scalar::Zero => vec![],
            Scalar::Real(a) => vec![a],
            Scalar::Complex(z) => vec![z.re, z.im],
            Scalar::DualTrivial(d) | Scalar::DualConj(d) => vec![d.re, d.eps],
            Scalar::Quaternion(q) => vec![q.w, q.x, q.y, q.z],
            Scalar::DoubleComplex(a, c) => vec![a.re, a.im, c.re, c.im],
            Scalar::Integer(n) => vec![n as f64],
        }
    }

    /// Largest absolute component; the scalar part of the `max` norm.
    pub fn max_abs(&self) -> f64 {
        self.components().into_iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        self.ring() == other.ring() && (*self - *other).max_abs() <= tol
    }

    /// Default-tolerance comparison (absolute `1e-9`).
    pub fn approx_eq_default(&self, other: &Scalar) -> bool {
        self.approx_eq(other, DEFAULT_SCALAR_TOL)
    }
}

pub const DEFAULT_SCALAR_TOL: f64 = 1e-9;

fn dual_mul(a: Dual, b: Dual) -> Dual {
    Dual::new(a.re * b.re, a.re * b.eps + a.eps * b.re)
}

fn dual_inv(d: Dual) -> Dual {
    Dual::new(1.0 / d.re, -d.eps / (d.re * d.re))
}

// The operator impls panic on ring mismatch; matrix code checks rings up front.
impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self.try_add(&o).expect("scalar ring mismatch")
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self.try_add(&o.neg()).expect("scalar ring mismatch")
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self.try_mul(&o).expect("scalar ring mismatch")
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Scalar::Zero => write!(f, "0"),
            Scalar::Real(a) => write!(f, "{a}"),
            Scalar::Complex(z) => write!(f, "{}{:+}i", z.re, z.im),
            Scalar::DualTrivial(d) | Scalar::DualConj(d) => write!(f, "{}{:+}ε", d.re, d.eps),
            Scalar::Quaternion(q) => write!(f, "{}{:+}i{:+}j{:+}k", q.w, q.x, q.y, q.z),
            Scalar::DoubleComplex(a, c) => {
                write!(f, "({}{:+}i, {}{:+}i)", a.re, a.im, c.re, c.im)
            }
            Scalar::Integer(n) => write!(f, "{n}"),
        }
    }
}
