//! Rational functions in one variable over an exact scalar field, kept in
//! reduced form (coprime numerator/denominator, monic denominator).
//!
//! The key operation for identity verification is [`RationalFunction::series_at_zero`]:
//! the exact jet of the function at x = 0, with a typed error carrying the
//! pole order when the function is not regular there.

use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::series::{SeriesError, TruncatedSeries};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFunError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("pole of order {order} at the expansion point")]
    PoleAtOrigin { order: usize },
}

/// Reduced fraction of polynomials; denominator monic and coprime to the
/// numerator, so `den(0) = 0` genuinely means a pole at the origin.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction<K: Scalar> {
    num: Polynomial<K>,
    den: Polynomial<K>,
}

impl<K: Scalar> RationalFunction<K> {
    pub fn new(num: Polynomial<K>, den: Polynomial<K>) -> Result<Self, RatFunError> {
        if den.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree_or_zero() > 0 {
            (num.div_exact(&g), den.div_exact(&g))
        } else {
            (num, den)
        };
        let lead_inv = den.leading().unwrap().inv().expect("nonzero leading");
        Ok(RationalFunction {
            num: num.scale(&lead_inv),
            den: den.scale(&lead_inv),
        })
    }

    pub fn from_poly(p: Polynomial<K>) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: K) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn x() -> Self {
        Self::from_poly(Polynomial::x())
    }

    pub fn num(&self) -> &Polynomial<K> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<K> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Degree as a map of the Riemann sphere: max(deg num, deg den).
    pub fn map_degree(&self) -> usize {
        self.num.degree_or_zero().max(self.den.degree_or_zero())
    }

    pub fn eval(&self, x: &K) -> Option<K> {
        let d = self.den.eval(x);
        d.inv().map(|i| self.num.eval(x) * i)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, RatFunError> {
        if rhs.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::from_poly(Polynomial::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let den = &self.den * &self.den;
        Self::new(num, den).expect("nonzero denominator")
    }

    /// Composition `self(inner(x))` with a rational inner map.
    pub fn compose(&self, inner: &Self) -> Self {
        let d = self.num.degree_or_zero().max(self.den.degree_or_zero());
        let num = self.num.compose_fraction(&inner.num, &inner.den, d);
        let den = self.den.compose_fraction(&inner.num, &inner.den, d);
        Self::new(num, den).expect("inner map nonconstant on denominator")
    }

    /// Exact jet at x = 0 of order N. Errors with the pole order when the
    /// reduced denominator vanishes at 0.
    pub fn series_at_zero(&self, order: usize) -> Result<TruncatedSeries<K>, RatFunError> {
        if let Some(v) = self.den.valuation() {
            if v > 0 {
                // reduced form: numerator cannot also vanish at 0
                return Err(RatFunError::PoleAtOrigin { order: v });
            }
        } else {
            return Err(RatFunError::ZeroDenominator);
        }
        let num = TruncatedSeries::from_polynomial(&self.num, order);
        let den = TruncatedSeries::from_polynomial(&self.den, order);
        match num.div(&den) {
            Ok(s) => Ok(s),
            Err(SeriesError::ZeroConstantTerm) => unreachable!("den(0) checked nonzero"),
            Err(_) => unreachable!("div only fails on zero constant term"),
        }
    }
}

impl<K: Scalar> fmt::Debug for RationalFunction<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<K: Scalar> fmt::Display for RationalFunction<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new_i64(n, d)
    }

    fn poly(cs: &[i64]) -> Polynomial<Rational> {
        Polynomial::from_coeffs(cs.iter().map(|&c| Rational::from(c)).collect())
    }

    fn jet(cs: &[(i64, i64)]) -> TruncatedSeries<Rational> {
        TruncatedSeries::from_coeffs(cs.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn reduction_and_monic_denominator() {
        // (x^2 - 1)/(2x - 2) = (x + 1)/2
        let r = RationalFunction::new(poly(&[-1, 0, 1]), poly(&[-2, 2])).unwrap();
        assert_eq!(r.num(), &Polynomial::from_coeffs(vec![q(1, 2), q(1, 2)]));
        assert_eq!(r.den(), &Polynomial::one());
    }

    #[test]
    fn series_of_marked_cubic() {
        // x(4x-3)^2 = 9x - 24x^2 + 16x^3
        let phi = RationalFunction::from_poly(&poly(&[0, 1]) * &poly(&[-3, 4]).pow_usize(2));
        assert_eq!(
            phi.series_at_zero(3).unwrap(),
            jet(&[(0, 1), (9, 1), (-24, 1), (16, 1)])
        );
    }

    #[test]
    fn series_of_quotient() {
        // x^3/(4-3x)^2: first nonzero coefficient x^3/16
        let phi = RationalFunction::new(poly(&[0, 0, 0, 1]), poly(&[4, -3]).pow_usize(2)).unwrap();
        let s = phi.series_at_zero(3).unwrap();
        assert_eq!(s.coeff(0), q(0, 1));
        assert_eq!(s.coeff(1), q(0, 1));
        assert_eq!(s.coeff(2), q(0, 1));
        assert_eq!(s.coeff(3), q(1, 16));
        // 1/(1-x) expands to the geometric series
        let g = RationalFunction::new(poly(&[1]), poly(&[1, -1])).unwrap();
        assert_eq!(
            g.series_at_zero(3).unwrap(),
            jet(&[(1, 1), (1, 1), (1, 1), (1, 1)])
        );
    }

    #[test]
    fn pole_at_origin_reports_order() {
        let r = RationalFunction::new(poly(&[1]), poly(&[0, 0, 1])).unwrap();
        assert_eq!(
            r.series_at_zero(4),
            Err(RatFunError::PoleAtOrigin { order: 2 })
        );
        // removable x cancels in reduced form: x/x^2 has pole order 1
        let r2 = RationalFunction::new(poly(&[0, 1]), poly(&[0, 0, 1])).unwrap();
        assert_eq!(
            r2.series_at_zero(4),
            Err(RatFunError::PoleAtOrigin { order: 1 })
        );
    }

    #[test]
    fn compose_degree_multiplies() {
        // (x^2) o (x^2) = x^4; degree-2 map of degree-2 map
        let sq = RationalFunction::from_poly(poly(&[0, 0, 1]));
        let quartic = sq.compose(&sq);
        assert_eq!(quartic.num(), &poly(&[0, 0, 0, 0, 1]));
        // Moebius composed with Moebius stays degree 1
        let m1 = RationalFunction::new(poly(&[0, 1]), poly(&[-1, 1])).unwrap(); // x/(x-1)
        let m2 = m1.compose(&m1);
        assert_eq!(m2.map_degree(), 1);
        // x/(x-1) is an involution
        assert_eq!(m2, RationalFunction::x());
    }

    #[test]
    fn derivative_quotient_rule() {
        // d/dx [x/(1-x)] = 1/(1-x)^2
        let r = RationalFunction::new(poly(&[0, 1]), poly(&[1, -1])).unwrap();
        let d = r.derivative();
        let expected = RationalFunction::new(poly(&[1]), &poly(&[1, -1]) * &poly(&[1, -1])).unwrap();
        assert_eq!(d, expected);
    }
}
