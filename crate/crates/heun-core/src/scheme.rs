//! Riemann schemes: the table of singular points of a second-order
//! Fuchsian operator on the projective line together with the two local
//! exponents at each point.
//!
//! The scheme is the bookkeeping object behind exponent transport under
//! pull-back and behind the "signature" of an equation (the multiset of
//! exponent differences), and it carries the classical constraint that
//! all exponents of an operator with n singular points sum to n - 2.

use crate::scalar::Scalar;
use std::fmt;

/// A point of the projective line over the scalar field.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum PointOnLine<K: Scalar> {
    Finite(K),
    Infinity,
}

impl<K: Scalar> PointOnLine<K> {
    pub fn zero() -> Self {
        PointOnLine::Finite(K::zero())
    }

    pub fn one() -> Self {
        PointOnLine::Finite(K::one())
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, PointOnLine::Infinity)
    }
}

impl<K: Scalar> fmt::Display for PointOnLine<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointOnLine::Finite(c) => write!(f, "{c}"),
            PointOnLine::Infinity => write!(f, "oo"),
        }
    }
}

/// One row of a Riemann scheme: a singular point and its two exponents.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LocalExponents<K: Scalar> {
    pub location: PointOnLine<K>,
    pub exponents: [K; 2],
}

impl<K: Scalar> LocalExponents<K> {
    pub fn new(location: PointOnLine<K>, e0: K, e1: K) -> Self {
        LocalExponents {
            location,
            exponents: [e0, e1],
        }
    }

    /// Exponent difference, canonicalized so that (d, -d) give one value.
    pub fn difference(&self) -> K {
        (self.exponents[1].clone() - self.exponents[0].clone()).abs_canonical()
    }

    /// The local solutions are free of logarithms for generic accessory
    /// data exactly when the difference is not an integer; an integer
    /// difference flags a point needing resonance analysis.
    pub fn has_integer_difference(&self) -> bool {
        (self.exponents[1].clone() - self.exponents[0].clone()).is_integer()
    }
}

/// Riemann scheme of a second-order Fuchsian operator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RiemannScheme<K: Scalar> {
    pub rows: Vec<LocalExponents<K>>,
}

impl<K: Scalar> RiemannScheme<K> {
    pub fn new(rows: Vec<LocalExponents<K>>) -> Self {
        RiemannScheme { rows }
    }

    pub fn row_at(&self, location: &PointOnLine<K>) -> Option<&LocalExponents<K>> {
        self.rows.iter().find(|r| &r.location == location)
    }

    /// Sum of all exponents over all rows.
    pub fn fuchs_sum(&self) -> K {
        let mut acc = K::zero();
        for r in &self.rows {
            acc = acc + r.exponents[0].clone() + r.exponents[1].clone();
        }
        acc
    }

    /// For a second-order operator with n singular points the exponent sum
    /// must equal n - 2.
    pub fn fuchs_relation_holds(&self) -> bool {
        let n = self.rows.len() as i64;
        self.fuchs_sum() == K::from_i64(n - 2)
    }

    /// Exponent differences row by row, in row order.
    pub fn differences(&self) -> Vec<K> {
        self.rows.iter().map(|r| r.difference()).collect()
    }

    /// The signature: exponent differences as a canonically sorted multiset,
    /// insensitive to row order and to the sign of each difference.
    pub fn signature(&self) -> Vec<K> {
        let mut d = self.differences();
        d.sort_by_key(|c| c.sort_key());
        d
    }
}

impl<K: Scalar> fmt::Display for RiemannScheme<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{}: {}, {}", r.location, r.exponents[0], r.exponents[1])?;
        }
        Ok(())
    }
}
