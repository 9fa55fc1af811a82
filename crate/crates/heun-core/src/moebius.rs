//! Fractional-linear (Moebius) maps x -> (p x + q)/(r x + s) as invertible
//! 2x2 matrices over the scalar field, acting on the projective line.
//!
//! These are the argument substitutions of the solution-expression groups
//! (both equation families) and the changes of variable that identify
//! coverings differing only by coordinates.

use crate::ratfun::RationalFunction;
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::scheme::PointOnLine;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MoebiusMap<K: Scalar> {
    pub p: K,
    pub q: K,
    pub r: K,
    pub s: K,
}

impl<K: Scalar> MoebiusMap<K> {
    pub fn new(p: K, q: K, r: K, s: K) -> Self {
        let m = MoebiusMap { p, q, r, s };
        assert!(!m.det().is_zero(), "moebius map must be invertible");
        m
    }

    pub fn identity() -> Self {
        MoebiusMap {
            p: K::one(),
            q: K::zero(),
            r: K::zero(),
            s: K::one(),
        }
    }

    pub fn det(&self) -> K {
        self.p.clone() * self.s.clone() - self.q.clone() * self.r.clone()
    }

    /// Matrix product: (self . other)(x) = self(other(x)).
    pub fn compose(&self, other: &Self) -> Self {
        MoebiusMap {
            p: self.p.clone() * other.p.clone() + self.q.clone() * other.r.clone(),
            q: self.p.clone() * other.q.clone() + self.q.clone() * other.s.clone(),
            r: self.r.clone() * other.p.clone() + self.s.clone() * other.r.clone(),
            s: self.r.clone() * other.q.clone() + self.s.clone() * other.s.clone(),
        }
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap {
            p: self.s.clone(),
            q: -self.q.clone(),
            r: -self.r.clone(),
            s: self.p.clone(),
        }
    }

    /// Scale all four entries so the first nonzero one (in p, q, r, s
    /// order) becomes 1; projectively equal maps then compare equal.
    pub fn normalize(&self) -> Self {
        let pivot = [&self.p, &self.q, &self.r, &self.s]
            .into_iter()
            .find(|c| !c.is_zero())
            .expect("invertible map has a nonzero entry")
            .clone();
        let inv = pivot.inv().unwrap();
        MoebiusMap {
            p: self.p.clone() * inv.clone(),
            q: self.q.clone() * inv.clone(),
            r: self.r.clone() * inv.clone(),
            s: self.s.clone() * inv,
        }
    }

    pub fn projectively_equal(&self, other: &Self) -> bool {
        self.normalize() == other.normalize()
    }

    pub fn is_identity(&self) -> bool {
        self.projectively_equal(&Self::identity())
    }

    /// Value at a finite point, None on the pole.
    pub fn apply(&self, x: &K) -> Option<K> {
        let den = self.r.clone() * x.clone() + self.s.clone();
        let num = self.p.clone() * x.clone() + self.q.clone();
        den.inv().map(|i| num * i)
    }

    /// Total action on the projective line.
    pub fn apply_point(&self, x: &PointOnLine<K>) -> PointOnLine<K> {
        match x {
            PointOnLine::Finite(v) => {
                let den = self.r.clone() * v.clone() + self.s.clone();
                if den.is_zero() {
                    PointOnLine::Infinity
                } else {
                    let num = self.p.clone() * v.clone() + self.q.clone();
                    PointOnLine::Finite(num * den.inv().unwrap())
                }
            }
            PointOnLine::Infinity => {
                if self.r.is_zero() {
                    PointOnLine::Infinity
                } else {
                    PointOnLine::Finite(self.p.clone() * self.r.inv().unwrap())
                }
            }
        }
    }

    /// The unique map sending the three pairwise distinct points
    /// (a, b, c) to (0, 1, infinity).  None if any two coincide.
    pub fn to_standard(
        a: &PointOnLine<K>,
        b: &PointOnLine<K>,
        c: &PointOnLine<K>,
    ) -> Option<Self> {
        if a == b || b == c || a == c {
            return None;
        }
        use PointOnLine::{Finite, Infinity};
        let m = match (a, b, c) {
            (Finite(a), Finite(b), Finite(c)) => {
                // (b - c)(x - a) / ((b - a)(x - c))
                let bc = b.clone() - c.clone();
                let ba = b.clone() - a.clone();
                MoebiusMap {
                    p: bc.clone(),
                    q: -(a.clone() * bc),
                    r: ba.clone(),
                    s: -(c.clone() * ba),
                }
            }
            (Infinity, Finite(b), Finite(c)) => {
                // (b - c) / (x - c)
                MoebiusMap {
                    p: K::zero(),
                    q: b.clone() - c.clone(),
                    r: K::one(),
                    s: -c.clone(),
                }
            }
            (Finite(a), Infinity, Finite(c)) => {
                // (x - a) / (x - c)
                MoebiusMap {
                    p: K::one(),
                    q: -a.clone(),
                    r: K::one(),
                    s: -c.clone(),
                }
            }
            (Finite(a), Finite(b), Infinity) => {
                // (x - a) / (b - a)
                MoebiusMap {
                    p: K::one(),
                    q: -a.clone(),
                    r: K::zero(),
                    s: b.clone() - a.clone(),
                }
            }
            _ => unreachable!("two of the three points coincide at infinity"),
        };
        debug_assert!(!m.det().is_zero());
        Some(m)
    }

    pub fn as_rational_function(&self) -> RationalFunction<K> {
        RationalFunction::new(
            Polynomial::from_coeffs(vec![self.q.clone(), self.p.clone()]),
            Polynomial::from_coeffs(vec![self.s.clone(), self.r.clone()]),
        )
        .unwrap()
    }
}

impl<K: Scalar> fmt::Display for MoebiusMap<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_rational_function())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new_i64(n, d)
    }

    fn m(p: i64, qq: i64, r: i64, s: i64) -> MoebiusMap<Rational> {
        MoebiusMap::new(q(p, 1), q(qq, 1), q(r, 1), q(s, 1))
    }

    #[test]
    fn compose_matches_evaluation() {
        let f = m(1, 0, 1, -1); // x/(x-1)
        let g = m(-1, 1, 0, 1); // 1-x
        let fg = f.compose(&g);
        let x = q(2, 5);
        let expect = f.apply(&g.apply(&x).unwrap()).unwrap();
        assert_eq!(fg.apply(&x).unwrap(), expect);
    }

    #[test]
    fn inverse_round_trip() {
        let f = m(3, 2, 5, 4);
        assert!(f.compose(&f.inverse()).is_identity());
        assert!(f.inverse().compose(&f).is_identity());
    }

    #[test]
    fn involution_x_over_x_minus_one() {
        let f = m(1, 0, 1, -1);
        assert!(f.compose(&f).is_identity());
    }

    #[test]
    fn pole_and_infinity_handling() {
        let f = m(1, 0, 1, -1);
        assert!(f.apply(&q(1, 1)).is_none());
        assert_eq!(
            f.apply_point(&PointOnLine::Finite(q(1, 1))),
            PointOnLine::Infinity
        );
        assert_eq!(
            f.apply_point(&PointOnLine::Infinity),
            PointOnLine::Finite(q(1, 1))
        );
        let aff = m(2, 1, 0, 1);
        assert_eq!(aff.apply_point(&PointOnLine::Infinity), PointOnLine::Infinity);
    }

    #[test]
    fn standard_triple_map_hits_the_marks() {
        use PointOnLine::{Finite, Infinity};
        let cases: Vec<[PointOnLine<Rational>; 3]> = vec![
            [Finite(q(3, 1)), Finite(q(-1, 2)), Finite(q(7, 5))],
            [Infinity, Finite(q(2, 1)), Finite(q(5, 1))],
            [Finite(q(2, 1)), Infinity, Finite(q(5, 1))],
            [Finite(q(2, 1)), Finite(q(5, 1)), Infinity],
        ];
        for [a, b, c] in cases {
            let m = MoebiusMap::to_standard(&a, &b, &c).unwrap();
            assert_eq!(m.apply_point(&a), Finite(Rational::zero()));
            assert_eq!(m.apply_point(&b), Finite(Rational::one()));
            assert_eq!(m.apply_point(&c), Infinity);
        }
        assert!(MoebiusMap::<Rational>::to_standard(
            &Finite(q(1, 1)),
            &Finite(q(1, 1)),
            &Infinity
        )
        .is_none());
    }

    #[test]
    fn projective_normalization() {
        let f = m(2, 4, 0, 6);
        let g = m(1, 2, 0, 3);
        assert!(f.projectively_equal(&g));
        assert_eq!(f.normalize(), g.normalize());
        let h = m(0, 5, 5, 0); // 1/x scaled
        assert_eq!(h.normalize(), m(0, 1, 1, 0));
    }
}
