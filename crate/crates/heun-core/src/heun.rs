//! The Heun operator: four regular singular points 0, 1, t, oo, an
//! accessory parameter q, and the local analytic solution at the origin
//! with value 1, produced by a three-term coefficient recurrence.
//!
//! Cleared of denominators the equation reads
//!     A(x) y'' + B(x) y' + C(x) y = 0,
//!     A = x(x-1)(x-t),
//!     B = (c+d+e) x^2 - (c(1+t) + d t + e) x + c t,
//!     C = a b x - q,
//! where e = a+b-c-d+1 fixes the exponent sum.  Local exponents:
//! 0: (0, 1-c), 1: (0, 1-d), t: (0, c+d-a-b), oo: (a, b).

use crate::hpg::{HypergeometricParams, RecurrenceObstruction};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::scheme::{LocalExponents, PointOnLine, RiemannScheme};
use crate::series::TruncatedSeries;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HeunParams<K: Scalar> {
    /// Location of the movable singular point (not 0 or 1).
    pub t: K,
    /// Accessory parameter.
    pub q: K,
    pub a: K,
    pub b: K,
    pub c: K,
    pub d: K,
}

impl<K: Scalar> HeunParams<K> {
    pub fn new(t: K, q: K, a: K, b: K, c: K, d: K) -> Self {
        HeunParams { t, q, a, b, c, d }
    }

    /// The exponent parameter at the movable point, determined by the
    /// other four.
    pub fn e(&self) -> K {
        self.a.clone() + self.b.clone() - self.c.clone() - self.d.clone() + K::one()
    }

    pub fn swap_upper(&self) -> Self {
        let mut p = self.clone();
        std::mem::swap(&mut p.a, &mut p.b);
        p
    }

    pub fn canonical_order(&self) -> Self {
        if self.b.sort_key() < self.a.sort_key() {
            self.swap_upper()
        } else {
            self.clone()
        }
    }

    /// The singular points 0, 1, t must be pairwise distinct.
    pub fn is_nondegenerate(&self) -> bool {
        !self.t.is_zero() && !self.t.is_one()
    }

    pub fn scheme(&self) -> RiemannScheme<K> {
        RiemannScheme::new(vec![
            LocalExponents::new(PointOnLine::zero(), K::zero(), K::one() - self.c.clone()),
            LocalExponents::new(PointOnLine::one(), K::zero(), K::one() - self.d.clone()),
            LocalExponents::new(
                PointOnLine::Finite(self.t.clone()),
                K::zero(),
                K::one() - self.e(),
            ),
            LocalExponents::new(PointOnLine::Infinity, self.a.clone(), self.b.clone()),
        ])
    }

    /// Coefficients (A, B, C) of the cleared operator A y'' + B y' + C y.
    pub fn operator(&self) -> [Polynomial<K>; 3] {
        let e = self.e();
        let (t, q, a, b, c, d) = (
            self.t.clone(),
            self.q.clone(),
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
        );
        let upper = Polynomial::from_coeffs(vec![
            K::zero(),
            t.clone(),
            -(K::one() + t.clone()),
            K::one(),
        ]);
        let middle = Polynomial::from_coeffs(vec![
            c.clone() * t.clone(),
            -(c.clone() * (K::one() + t.clone()) + d.clone() * t.clone() + e.clone()),
            c.clone() + d.clone() + e.clone(),
        ]);
        let lower = Polynomial::from_coeffs(vec![-q, a * b]);
        [upper, middle, lower]
    }

    /// Jet of the analytic solution with value 1 at the origin.  The
    /// coefficients satisfy the three-term recurrence
    ///   t (n+1)(n+c) u_{n+1}
    ///     = { n [ (n-1+c)(1+t) + d t + e ] + q } u_n
    ///       - (n-1+a)(n-1+b) u_{n-1}.
    pub fn series(&self, order: usize) -> Result<TruncatedSeries<K>, RecurrenceObstruction> {
        if !self.is_nondegenerate() {
            return Err(RecurrenceObstruction::Degenerate(format!(
                "singular point t = {} collides with 0 or 1",
                self.t
            )));
        }
        let e = self.e();
        let mut coeffs: Vec<K> = Vec::with_capacity(order + 1);
        coeffs.push(K::one());
        for n in 0..order {
            let nk = K::from_i64(n as i64);
            let middle = (nk.clone()
                * ((nk.clone() - K::one() + self.c.clone()) * (K::one() + self.t.clone())
                    + self.d.clone() * self.t.clone()
                    + e.clone())
                + self.q.clone())
                * coeffs[n].clone();
            let older = if n == 0 {
                K::zero()
            } else {
                (nk.clone() - K::one() + self.a.clone())
                    * (nk.clone() - K::one() + self.b.clone())
                    * coeffs[n - 1].clone()
            };
            let num = middle - older;
            let den = self.t.clone() * K::from_i64(n as i64 + 1) * (nk + self.c.clone());
            match den.inv() {
                Some(inv) => coeffs.push(num * inv),
                None => {
                    // Even a vanishing numerator does not rescue this: the
                    // normalized solution stops being unique.
                    return Err(RecurrenceObstruction::ZeroPivot {
                        step: n + 1,
                        pivot: format!("t (n+1) (c + n) at n = {n}"),
                    });
                }
            }
        }
        Ok(TruncatedSeries::from_coeffs(coeffs))
    }

    /// Exact residual of a jet in the cleared equation.
    pub fn ode_residual(&self, s: &TruncatedSeries<K>) -> TruncatedSeries<K> {
        let [upper, middle, lower] = self.operator();
        let d1 = s.derivative();
        let d2 = d1.derivative();
        d2.mul_polynomial(&upper)
            .add(&d1.mul_polynomial(&middle))
            .add(&s.mul_polynomial(&lower))
    }

    /// The movable singular point becomes ordinary exactly when
    /// d = a+b-c+1 and q = a b t; the local solution then satisfies the
    /// Gauss equation with parameters (a, b, c).
    pub fn reduces_to_hypergeometric(&self) -> Option<HypergeometricParams<K>> {
        let d_match = self.d.clone()
            == self.a.clone() + self.b.clone() - self.c.clone() + K::one();
        let q_match = self.q == self.a.clone() * self.b.clone() * self.t.clone();
        if d_match && q_match {
            Some(HypergeometricParams::new(
                self.a.clone(),
                self.b.clone(),
                self.c.clone(),
            ))
        } else {
            None
        }
    }

    /// The local solution is the constant 1 exactly when C = a b x - q
    /// vanishes identically.
    pub fn has_constant_solution(&self) -> bool {
        (self.a.clone() * self.b.clone()).is_zero() && self.q.is_zero()
    }
}

impl<K: Scalar> fmt::Display for HeunParams<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Hn(t={}, q={}; a={}, b={}; c={}, d={})",
            self.t, self.q, self.a, self.b, self.c, self.d
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new_i64(n, d)
    }

    fn generic() -> HeunParams<Rational> {
        HeunParams::new(q(1, 4), q(2, 3), q(1, 2), q(1, 3), q(3, 5), q(5, 7))
    }

    #[test]
    fn first_coefficient_is_q_over_ct() {
        let p = generic();
        let s = p.series(1).unwrap();
        let expect = p.q.clone() / (p.c.clone() * p.t.clone());
        assert_eq!(s.coeff(1), expect);
    }

    #[test]
    fn residual_of_solution_jet_vanishes() {
        let p = generic();
        let s = p.series(14).unwrap();
        let r = p.ode_residual(&s);
        assert!(r.is_zero(), "residual {:?} should vanish", r.coeffs());
        assert!(r.order() >= 12);
    }

    #[test]
    fn residual_detects_accessory_mutation() {
        let p = generic();
        let s = p.series(10).unwrap();
        let mut bad = p.clone();
        bad.q = bad.q + Rational::one();
        assert!(!bad.ode_residual(&s).is_zero());
    }

    #[test]
    fn residual_detects_singular_point_mutation() {
        let p = generic();
        let s = p.series(10).unwrap();
        let mut bad = p.clone();
        bad.t = bad.t + Rational::one();
        assert!(!bad.ode_residual(&s).is_zero());
    }

    #[test]
    fn reduction_to_gauss_matches_series() {
        // d = a+b-c+1 and q = a b t make the movable point ordinary.
        let (a, b, c, t) = (q(1, 3), q(-1, 4), q(2, 5), q(3, 7));
        let d = a.clone() + b.clone() - c.clone() + Rational::one();
        let acc = a.clone() * b.clone() * t.clone();
        let hp = HeunParams::new(t, acc, a.clone(), b.clone(), c.clone(), d);
        let gauss = hp.reduces_to_hypergeometric().expect("reduction holds");
        let s_heun = hp.series(16).unwrap();
        let s_gauss = gauss.series(16).unwrap();
        assert_eq!(s_heun, s_gauss);
    }

    #[test]
    fn reduction_requires_both_conditions() {
        let (a, b, c, t) = (q(1, 3), q(-1, 4), q(2, 5), q(3, 7));
        let d = a.clone() + b.clone() - c.clone() + Rational::one();
        let hp = HeunParams::new(t, q(1, 1), a, b, c, d);
        assert!(hp.reduces_to_hypergeometric().is_none());
    }

    #[test]
    fn constant_solution_case() {
        let p = HeunParams::new(q(1, 4), q(0, 1), q(0, 1), q(1, 3), q(3, 5), q(5, 7));
        assert!(p.has_constant_solution());
        let s = p.series(10).unwrap();
        assert_eq!(s, TruncatedSeries::one(10));
        assert!(p.ode_residual(&s).is_zero());
    }

    #[test]
    fn scheme_satisfies_fuchs_relation() {
        let p = generic();
        let scheme = p.scheme();
        assert_eq!(scheme.fuchs_sum(), Rational::from(2));
        assert!(scheme.fuchs_relation_holds());
        assert_eq!(scheme.rows.len(), 4);
    }

    #[test]
    fn degenerate_locations_are_rejected() {
        let p = HeunParams::new(q(0, 1), q(2, 3), q(1, 2), q(1, 3), q(3, 5), q(5, 7));
        assert!(matches!(
            p.series(4),
            Err(RecurrenceObstruction::Degenerate(_))
        ));
        let p1 = HeunParams::new(q(1, 1), q(2, 3), q(1, 2), q(1, 3), q(3, 5), q(5, 7));
        assert!(p1.series(4).is_err());
    }

    #[test]
    fn operator_factors_as_expected() {
        let p = generic();
        let [upper, _, _] = p.operator();
        // A = x(x-1)(x-t)
        let expect = &(&Polynomial::from_coeffs(vec![q(0, 1), q(1, 1)])
            * &Polynomial::from_coeffs(vec![q(-1, 1), q(1, 1)]))
            * &Polynomial::from_coeffs(vec![-p.t.clone(), q(1, 1)]);
        assert_eq!(upper, expect);
    }
}
