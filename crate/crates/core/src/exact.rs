//! Exact arithmetic for balanced-beamsplitter amplitudes.
//!
//! Every amplitude that appears at a beamsplitter with rational or `1/√2`
//! entries is a number of the form `q · 2^(-h/2)` (times a common
//! normalization square root). Sums of such numbers with mixed parity of `h`
//! live in `Q(√2)`, so [`ExactAmplitude`] stores `a + b√2` with rational
//! `a`, `b`. Zero testing and sign are then decidable exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact real number `rational + irrational·√2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactAmplitude {
    rational: BigRational,
    irrational: BigRational,
}

impl ExactAmplitude {
    pub fn zero() -> Self {
        Self {
            rational: BigRational::zero(),
            irrational: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self {
            rational: q,
            irrational: BigRational::zero(),
        }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    /// `a + b√2`.
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self {
            rational: a,
            irrational: b,
        }
    }

    /// The number `q · 2^(-h/2)`.
    pub fn from_pow2(q: BigRational, h: u32) -> Self {
        if h.is_multiple_of(2) {
            let denom = BigInt::one() << (h / 2);
            Self::from_rational(q / denom)
        } else {
            // 2^(-h/2) = √2 · 2^(-(h+1)/2)
            let denom = BigInt::one() << (h.div_ceil(2));
            Self {
                rational: BigRational::zero(),
                irrational: q / denom,
            }
        }
    }

    /// `1/√2`, the balanced transmission and reflection amplitude.
    pub fn inv_sqrt2() -> Self {
        Self::from_pow2(BigRational::one(), 1)
    }

    /// Recovers the `q · 2^(-h/2)` form when the value has one (i.e. it is
    /// purely rational or a rational multiple of `√2`). Zero maps to `(0, 0)`.
    pub fn to_pow2(&self) -> Option<(BigRational, u32)> {
        match (self.rational.is_zero(), self.irrational.is_zero()) {
            (_, true) => Some((self.rational.clone(), 0)),
            (true, false) => Some((&self.irrational * BigRational::from_integer(2.into()), 1)),
            (false, false) => None,
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn sqrt2_part(&self) -> &BigRational {
        &self.irrational
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.irrational.is_zero()
    }

    /// Returns the value as a rational if it has no `√2` component.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.irrational.is_zero().then_some(&self.rational)
    }

    /// Exact sign of `a + b√2`.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.rational);
        let sb = sign_of(&self.irrational);
        if sa == 0 || sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        // Opposite signs: compare a² with 2b².
        let a2 = &self.rational * &self.rational;
        let b2 = &self.irrational * &self.irrational * BigRational::from_integer(2.into());
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rational.to_f64().unwrap_or(f64::NAN);
        let b = self.irrational.to_f64().unwrap_or(f64::NAN);
        a + b * std::f64::consts::SQRT_2
    }
}

fn sign_of(q: &BigRational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl From<i64> for ExactAmplitude {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl Add for &ExactAmplitude {
    type Output = ExactAmplitude;
    fn add(self, rhs: Self) -> ExactAmplitude {
        ExactAmplitude {
            rational: &self.rational + &rhs.rational,
            irrational: &self.irrational + &rhs.irrational,
        }
    }
}

impl Add for ExactAmplitude {
    type Output = ExactAmplitude;
    fn add(self, rhs: Self) -> ExactAmplitude {
        &self + &rhs
    }
}

impl Sub for &ExactAmplitude {
    type Output = ExactAmplitude;
    fn sub(self, rhs: Self) -> ExactAmplitude {
        ExactAmplitude {
            rational: &self.rational - &rhs.rational,
            irrational: &self.irrational - &rhs.irrational,
        }
    }
}

impl Sub for ExactAmplitude {
    type Output = ExactAmplitude;
    fn sub(self, rhs: Self) -> ExactAmplitude {
        &self - &rhs
    }
}

impl Mul for &ExactAmplitude {
    type Output = ExactAmplitude;
    fn mul(self, rhs: Self) -> ExactAmplitude {
        let two = BigRational::from_integer(2.into());
        ExactAmplitude {
            rational: &self.rational * &rhs.rational + &self.irrational * &rhs.irrational * two,
            irrational: &self.rational * &rhs.irrational + &self.irrational * &rhs.rational,
        }
    }
}

impl Mul for ExactAmplitude {
    type Output = ExactAmplitude;
    fn mul(self, rhs: Self) -> ExactAmplitude {
        &self * &rhs
    }
}

impl Neg for ExactAmplitude {
    type Output = ExactAmplitude;
    fn neg(self) -> ExactAmplitude {
        ExactAmplitude {
            rational: -self.rational,
            irrational: -self.irrational,
        }
    }
}

impl fmt::Display for ExactAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.irrational.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.rational),
            (true, false) => write!(f, "{}·√2", self.irrational),
            (false, false) => write!(f, "{} + {}·√2", self.rational, self.irrational),
        }
    }
}

/// An exact amplitude `coefficient · √scale_sq` with `scale_sq ≥ 0` rational.
///
/// All diagrams contributing to one output state share the same `scale_sq`
/// (the bosonic normalization `Na! Nb! / (n! m!)`), so sums stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledAmplitude {
    pub coefficient: ExactAmplitude,
    pub scale_sq: BigRational,
}

impl ScaledAmplitude {
    pub fn new(coefficient: ExactAmplitude, scale_sq: BigRational) -> Self {
        debug_assert!(!scale_sq.is_negative());
        Self { coefficient, scale_sq }
    }

    pub fn zero() -> Self {
        Self::new(ExactAmplitude::zero(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero() || self.scale_sq.is_zero()
    }

    pub fn signum(&self) -> i8 {
        if self.scale_sq.is_zero() {
            0
        } else {
            self.coefficient.signum()
        }
    }

    /// Squared magnitude, exact.
    pub fn probability(&self) -> ExactAmplitude {
        &self.coefficient.square() * &ExactAmplitude::from_rational(self.scale_sq.clone())
    }

    /// Sum of two amplitudes sharing the same normalization.
    ///
    /// Returns `None` when the scales differ and neither side is zero.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return Some(self.clone());
        }
        if self.is_zero() {
            return Some(other.clone());
        }
        (self.scale_sq == other.scale_sq).then(|| Self {
            coefficient: &self.coefficient + &other.coefficient,
            scale_sq: self.scale_sq.clone(),
        })
    }

    /// `|self| == |other|`, decided exactly.
    pub fn same_magnitude(&self, other: &Self) -> bool {
        self.probability() == other.probability()
    }

    pub fn to_f64(&self) -> f64 {
        self.coefficient.to_f64() * self.scale_sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl fmt::Display for ScaledAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale_sq.is_one() {
            write!(f, "{}", self.coefficient)
        } else {
            write!(f, "({})·√({})", self.coefficient, self.scale_sq)
        }
    }
}

pub(crate) fn rational_from_ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
