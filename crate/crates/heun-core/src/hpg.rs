//! The Gauss hypergeometric operator: parameters, Riemann scheme, the
//! Taylor jet of the distinguished local solution at 0, and the exact
//! ODE-residual check used as the correctness oracle throughout.
//!
//! Cleared of denominators the equation reads
//!     (z^2 - z) y'' + ((a+b+1) z - c) y' + a b y = 0,
//! with local exponents 0: (0, 1-c), 1: (0, c-a-b), oo: (a, b).

use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::scheme::{LocalExponents, PointOnLine, RiemannScheme};
use crate::series::TruncatedSeries;
use std::fmt;
use thiserror::Error;

/// Why a coefficient recurrence cannot produce the requested jet.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecurrenceObstruction {
    #[error("coefficient recurrence divides by zero at step {step} ({pivot} vanishes)")]
    ZeroPivot { step: usize, pivot: String },
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HypergeometricParams<K: Scalar> {
    pub a: K,
    pub b: K,
    pub c: K,
}

impl<K: Scalar> HypergeometricParams<K> {
    pub fn new(a: K, b: K, c: K) -> Self {
        HypergeometricParams { a, b, c }
    }

    pub fn swap_upper(&self) -> Self {
        HypergeometricParams {
            a: self.b.clone(),
            b: self.a.clone(),
            c: self.c.clone(),
        }
    }

    /// The upper parameters commute; order them canonically for equality
    /// checks on solution records.
    pub fn canonical_order(&self) -> Self {
        if self.b.sort_key() < self.a.sort_key() {
            self.swap_upper()
        } else {
            self.clone()
        }
    }

    pub fn scheme(&self) -> RiemannScheme<K> {
        let (a, b, c) = (self.a.clone(), self.b.clone(), self.c.clone());
        RiemannScheme::new(vec![
            LocalExponents::new(PointOnLine::zero(), K::zero(), K::one() - c.clone()),
            LocalExponents::new(
                PointOnLine::one(),
                K::zero(),
                c.clone() - a.clone() - b.clone(),
            ),
            LocalExponents::new(PointOnLine::Infinity, a, b),
        ])
    }

    /// Coefficients (A, B, C) of the cleared operator A y'' + B y' + C y.
    pub fn operator(&self) -> [Polynomial<K>; 3] {
        let (a, b, c) = (self.a.clone(), self.b.clone(), self.c.clone());
        let upper = Polynomial::from_coeffs(vec![K::zero(), -K::one(), K::one()]);
        let middle = Polynomial::from_coeffs(vec![-c, a.clone() + b.clone() + K::one()]);
        let lower = Polynomial::constant(a * b);
        [upper, middle, lower]
    }

    /// Jet of the analytic solution with value 1 at the origin:
    /// coefficients follow c_{n+1} = c_n (a+n)(b+n) / ((c+n)(n+1)).
    pub fn series(&self, order: usize) -> Result<TruncatedSeries<K>, RecurrenceObstruction> {
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(K::one());
        for n in 0..order {
            let nk = K::from_i64(n as i64);
            let prev: &K = &coeffs[n];
            if prev.is_zero() {
                coeffs.push(K::zero());
                continue;
            }
            let num = (self.a.clone() + nk.clone()) * (self.b.clone() + nk.clone());
            let den = (self.c.clone() + nk.clone()) * K::from_i64(n as i64 + 1);
            match den.inv() {
                Some(inv) => coeffs.push(prev.clone() * num * inv),
                None => {
                    return Err(RecurrenceObstruction::ZeroPivot {
                        step: n + 1,
                        pivot: format!("(c + {n})"),
                    })
                }
            }
        }
        Ok(TruncatedSeries::from_coeffs(coeffs))
    }

    /// Exact residual of a jet in the cleared equation.  For a jet of a
    /// true solution every retained coefficient vanishes.
    pub fn ode_residual(&self, s: &TruncatedSeries<K>) -> TruncatedSeries<K> {
        let [upper, middle, lower] = self.operator();
        let d1 = s.derivative();
        let d2 = d1.derivative();
        d2.mul_polynomial(&upper)
            .add(&d1.mul_polynomial(&middle))
            .add(&s.mul_polynomial(&lower))
    }
}

impl<K: Scalar> fmt::Display for HypergeometricParams<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F(a={}, b={}; c={})", self.a, self.b, self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new_i64(n, d)
    }

    fn params(a: Rational, b: Rational, c: Rational) -> HypergeometricParams<Rational> {
        HypergeometricParams::new(a, b, c)
    }

    #[test]
    fn classical_series_coefficients() {
        // F(1/2, 1/2; 1; z) = 1 + z/4 + 9 z^2/64 + ...
        let p = params(q(1, 2), q(1, 2), q(1, 1));
        let s = p.series(2).unwrap();
        assert_eq!(s.coeff(0), q(1, 1));
        assert_eq!(s.coeff(1), q(1, 4));
        assert_eq!(s.coeff(2), q(9, 64));
    }

    #[test]
    fn binomial_special_case() {
        // F(a, b; b; z) = (1-z)^(-a), independent of b.
        let p = params(q(-3, 7), q(2, 5), q(2, 5));
        let s = p.series(8).unwrap();
        let one_minus_z = TruncatedSeries::from_coeffs({
            let mut v = vec![q(1, 1), q(-1, 1)];
            v.resize(9, q(0, 1));
            v
        });
        let expect = one_minus_z.pow_scalar(&q(3, 7)).unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn residual_of_solution_jet_vanishes() {
        let p = params(q(1, 3), q(-2, 5), q(5, 7));
        let s = p.series(12).unwrap();
        let r = p.ode_residual(&s);
        assert!(r.is_zero(), "residual {:?} should vanish", r.coeffs());
        assert!(r.order() >= 10);
    }

    #[test]
    fn residual_detects_wrong_jet() {
        let p = params(q(1, 3), q(-2, 5), q(5, 7));
        let mut coeffs: Vec<Rational> = p.series(8).unwrap().coeffs().to_vec();
        coeffs[5] = coeffs[5].clone() + q(1, 1);
        let bad = TruncatedSeries::from_coeffs(coeffs);
        assert!(!p.ode_residual(&bad).is_zero());
    }

    #[test]
    fn terminating_series_survives_bad_denominator_beyond_end() {
        // a = -2 terminates the series at degree 2; c = -5 only pivots at
        // n = 5, after every later coefficient is already zero.
        let p = params(q(-2, 1), q(1, 2), q(-5, 1));
        let s = p.series(8).unwrap();
        assert!(s.coeff(3).is_zero());
        assert!(s.coeff(8).is_zero());
        assert!(p.ode_residual(&s).is_zero());
    }

    #[test]
    fn nonterminating_resonance_is_an_error() {
        let p = params(q(1, 2), q(1, 3), q(-2, 1));
        match p.series(8) {
            Err(RecurrenceObstruction::ZeroPivot { step, .. }) => assert_eq!(step, 3),
            other => panic!("expected pivot failure, got {other:?}"),
        }
    }

    #[test]
    fn scheme_satisfies_fuchs_relation() {
        let p = params(q(1, 6), q(5, 6), q(1, 2));
        let scheme = p.scheme();
        assert!(scheme.fuchs_relation_holds());
        assert_eq!(
            scheme.signature(),
            vec![q(1, 2), q(1, 2), q(2, 3)].into_iter().collect::<Vec<_>>()
        );
    }

    #[test]
    fn canonical_order_sorts_upper_parameters() {
        let p = params(q(5, 6), q(1, 6), q(1, 2));
        let cp = p.canonical_order();
        assert_eq!(cp.a, q(1, 6));
        assert_eq!(cp.b, q(5, 6));
        assert_eq!(cp.canonical_order(), cp);
    }
}
