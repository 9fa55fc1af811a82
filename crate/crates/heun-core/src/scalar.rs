//! Exact scalar fields: arbitrary-precision rationals and their quadratic
//! extension by a primitive cube root of unity.
//!
//! Provides:
//! - [`Rational`]: arbitrary-precision rational numbers, always in lowest
//!   terms with positive denominator.
//! - [`OmegaRational`]: the field Q(w) with w^2 + w + 1 = 0, represented as
//!   `re + om*w` with rational components.
//! - [`Scalar`]: the field interface the whole engine is generic over.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Field interface for exact coefficient arithmetic.
///
/// Implemented by [`Rational`] (the field Q) and [`OmegaRational`]
/// (the field Q(w)). Operations never round; division by zero is surfaced
/// through [`Scalar::inv`] returning `None` rather than panicking, so
/// callers can turn degenerate parameter choices into typed errors.
pub trait Scalar:
    Clone
    + PartialEq
    + Eq
    + std::hash::Hash
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Human-readable field name used in diagnostics ("Q" or "Q(w)").
    const FIELD_NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;

    /// Embedding of Q into the field.
    fn from_rational(r: Rational) -> Self;
    fn from_i64(n: i64) -> Self;

    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;

    /// The rational part if the element lies in Q, else `None`.
    fn as_rational(&self) -> Option<Rational>;

    /// True when the element is a rational integer.
    fn is_integer(&self) -> bool;

    /// Canonical representative of the pair `{x, -x}`, used when comparing
    /// exponent differences that are only defined up to sign.
    fn abs_canonical(&self) -> Self;

    /// Total order used only for canonical sorting of records (not a field
    /// order).
    fn sort_key(&self) -> (Rational, Rational);

    fn div_checked(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|i| self.clone() * i)
    }

    /// A primitive cube root of unity when the field contains one.  Catalog
    /// expressions name it `w`; over Q it does not exist.
    fn cube_root_of_unity() -> Option<Self> {
        None
    }

    /// Integer power with negative exponents allowed for nonzero bases.
    fn pow_i64(&self, e: i64) -> Option<Self> {
        if e < 0 {
            return self.inv().map(|i| i.pow_i64(-e).expect("positive power"));
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            k >>= 1;
        }
        Some(acc)
    }
}

/// Arbitrary-precision rational number in lowest terms.
///
/// Thin wrapper around `num`'s `BigRational` keeping the invariants the
/// engine relies on (reduced form, positive denominator) and the display
/// syntax used by the catalog files (`-3/4`, `7`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new_i64(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rational(BigRational::new(num, den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// max(|numerator|, denominator), the height used to bound random
    /// parameter samples.
    pub fn height(&self) -> BigInt {
        let n = self.0.numer().abs();
        let d = self.0.denom().clone();
        if n > d {
            n
        } else {
            d
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        if !self.is_integer() {
            return None;
        }
        i64::try_from(self.0.numer().clone()).ok()
    }

    pub(crate) fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let r: BigRational = s.parse().map_err(|e| format!("bad rational {s:?}: {e}"))?;
        Ok(Rational(r))
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.0.is_zero(), "division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational(BigRational::from(BigInt::from(n)))
    }
}

impl Scalar for Rational {
    const FIELD_NAME: &'static str = "Q";

    fn zero() -> Self {
        Rational(BigRational::zero())
    }

    fn one() -> Self {
        Rational(BigRational::one())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_one(&self) -> bool {
        self.0.is_one()
    }

    fn from_rational(r: Rational) -> Self {
        r
    }

    fn from_i64(n: i64) -> Self {
        Rational::from(n)
    }

    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    fn abs_canonical(&self) -> Self {
        self.abs()
    }

    fn sort_key(&self) -> (Rational, Rational) {
        (self.clone(), Rational::zero())
    }
}

/// Element of Q(w) where w is a primitive cube root of unity
/// (`w^2 = -w - 1`), stored as `re + om*w`.
///
/// The norm form is `re^2 - re*om + om^2`, positive definite, so the
/// representation supports exact division. Note `1 + 2w` is a square root
/// of -3, which is how quadratic factors with discriminant `-3*(square)`
/// split over this field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OmegaRational {
    pub re: Rational,
    pub om: Rational,
}

impl OmegaRational {
    pub fn new(re: Rational, om: Rational) -> Self {
        OmegaRational { re, om }
    }

    /// The generator w itself.
    pub fn omega() -> Self {
        OmegaRational {
            re: Rational::zero(),
            om: Rational::one(),
        }
    }

    /// Galois conjugate: w -> w^2 = -1 - w.
    pub fn conj(&self) -> Self {
        OmegaRational {
            re: &self.re - &self.om,
            om: -self.om.clone(),
        }
    }

    /// Field norm `x * conj(x)` as a rational.
    pub fn norm(&self) -> Rational {
        &(&self.re * &self.re) - &(&self.re * &self.om) + (&self.om * &self.om)
    }
}

impl fmt::Debug for OmegaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OmegaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.om.is_zero() {
            return write!(f, "{}", self.re);
        }
        let om_part = |f: &mut fmt::Formatter<'_>, om: &Rational| -> fmt::Result {
            if om.is_one() {
                write!(f, "w")
            } else if (-om.clone()).is_one() {
                write!(f, "-w")
            } else {
                write!(f, "{om}*w")
            }
        };
        if self.re.is_zero() {
            return om_part(f, &self.om);
        }
        write!(f, "{}", self.re)?;
        if self.om.is_negative() {
            write!(f, "-")?;
            let pos = self.om.abs();
            if pos.is_one() {
                write!(f, "w")
            } else {
                write!(f, "{pos}*w")
            }
        } else {
            write!(f, "+")?;
            om_part(f, &self.om)
        }
    }
}

impl Add for OmegaRational {
    type Output = OmegaRational;
    fn add(self, rhs: OmegaRational) -> OmegaRational {
        OmegaRational {
            re: self.re + rhs.re,
            om: self.om + rhs.om,
        }
    }
}

impl Sub for OmegaRational {
    type Output = OmegaRational;
    fn sub(self, rhs: OmegaRational) -> OmegaRational {
        OmegaRational {
            re: self.re - rhs.re,
            om: self.om - rhs.om,
        }
    }
}

impl Mul for OmegaRational {
    type Output = OmegaRational;
    fn mul(self, rhs: OmegaRational) -> OmegaRational {
        // (r1 + o1 w)(r2 + o2 w) with w^2 = -w - 1.
        let rr = &self.re * &rhs.re;
        let oo = &self.om * &rhs.om;
        let cross = &(&self.re * &rhs.om) + &(&self.om * &rhs.re);
        OmegaRational {
            re: &rr - &oo,
            om: &cross - &oo,
        }
    }
}

impl Neg for OmegaRational {
    type Output = OmegaRational;
    fn neg(self) -> OmegaRational {
        OmegaRational {
            re: -self.re,
            om: -self.om,
        }
    }
}

impl Div for OmegaRational {
    type Output = OmegaRational;
    fn div(self, rhs: OmegaRational) -> OmegaRational {
        self.div_checked(&rhs).expect("division by zero")
    }
}

impl Scalar for OmegaRational {
    const FIELD_NAME: &'static str = "Q(w)";

    fn zero() -> Self {
        OmegaRational {
            re: Rational::zero(),
            om: Rational::zero(),
        }
    }

    fn one() -> Self {
        OmegaRational {
            re: Rational::one(),
            om: Rational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.om.is_zero()
    }

    fn is_one(&self) -> bool {
        self.re.is_one() && self.om.is_zero()
    }

    fn from_rational(r: Rational) -> Self {
        OmegaRational {
            re: r,
            om: Rational::zero(),
        }
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(Rational::from(n))
    }

    fn inv(&self) -> Option<Self> {
        let n = self.norm();
        let ninv = n.inv()?;
        let c = self.conj();
        Some(OmegaRational {
            re: &c.re * &ninv,
            om: &c.om * &ninv,
        })
    }

    fn as_rational(&self) -> Option<Rational> {
        if self.om.is_zero() {
            Some(self.re.clone())
        } else {
            None
        }
    }

    fn is_integer(&self) -> bool {
        self.om.is_zero() && self.re.is_integer()
    }

    fn abs_canonical(&self) -> Self {
        let negate = self.re.is_negative() || (self.re.is_zero() && self.om.is_negative());
        if negate {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn sort_key(&self) -> (Rational, Rational) {
        (self.re.clone(), self.om.clone())
    }

    fn cube_root_of_unity() -> Option<Self> {
        Some(OmegaRational::omega())
    }
}
