//! Linear-factor extraction for univariate polynomials over the exact
//! fields in use: all rational roots of a polynomial over Q, and all roots
//! `u + v*w` (w a primitive cube root of unity) of a polynomial over Q(w).
//!
//! Rational roots come from the classical numerator/denominator divisor
//! search on a denominator-cleared polynomial.  Roots in Q(w) reduce to a
//! two-variable elimination: writing a candidate root as `u + v*w` and
//! splitting the polynomial value into its 1- and w-components gives two
//! polynomials in (u, v) whose common rational zeros are exactly the roots.
//! Every candidate is verified by direct evaluation before it is reported,
//! and found roots are divided out so the leftover factor is root-free.

use crate::multipoly::{eliminant, MultiPoly};
use crate::poly::Polynomial;
use crate::scalar::{OmegaRational, Rational, Scalar};
use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

/// Roots found in the coefficient field, with multiplicities, plus the
/// remaining factor that has no further roots in that field.
#[derive(Clone, Debug)]
pub struct RootReport<K: Scalar> {
    pub roots: Vec<(K, usize)>,
    pub leftover: Polynomial<K>,
}

impl<K: Scalar> RootReport<K> {
    /// Total number of roots counted with multiplicity.
    pub fn count_with_multiplicity(&self) -> usize {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    /// True when the polynomial splits into linear factors over the field.
    pub fn splits(&self) -> bool {
        self.leftover.degree_or_zero() == 0
    }
}

/// Fields over which we can enumerate all roots of a univariate polynomial.
pub trait FieldRoots: Scalar {
    fn polynomial_roots(p: &Polynomial<Self>) -> RootReport<Self>;
}

impl FieldRoots for Rational {
    fn polynomial_roots(p: &Polynomial<Self>) -> RootReport<Self> {
        rational_roots(p)
    }
}

impl FieldRoots for OmegaRational {
    fn polynomial_roots(p: &Polynomial<Self>) -> RootReport<Self> {
        omega_roots(p)
    }
}

/// Positive divisors of |n|, via trial division.  Any cofactor surviving
/// the trial bound is treated as prime; the inputs this crate produces are
/// smooth enough that the bound is never reached in practice.
fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut m = n.abs();
    assert!(!m.is_zero());
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut record = |p: BigInt, m: &mut BigInt| {
        let mut e = 0u32;
        while (&*m % &p).is_zero() {
            *m /= &p;
            e += 1;
        }
        if e > 0 {
            primes.push((p, e));
        }
    };
    record(BigInt::from(2), &mut m);
    let mut d = BigInt::from(3);
    let bound = BigInt::from(1_000_000u64);
    while &d * &d <= m && d <= bound {
        record(d.clone(), &mut m);
        d += 2;
    }
    if !m.is_one() {
        primes.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d0 in &divs {
            let mut powed = d0.clone();
            next.push(powed.clone());
            for _ in 0..e {
                powed = &powed * &p;
                next.push(powed.clone());
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    divs
}

/// Divide out the root `r` as many times as it divides `p`, returning the
/// multiplicity and the deflated polynomial.
fn deflate<K: Scalar>(p: &Polynomial<K>, r: &K) -> (usize, Polynomial<K>) {
    let lin = Polynomial::from_coeffs(vec![-r.clone(), K::one()]);
    let mut mult = 0;
    let mut q = p.clone();
    loop {
        let (quot, rem) = q.divmod(&lin);
        if rem.is_zero() {
            mult += 1;
            q = quot;
        } else {
            return (mult, q);
        }
    }
}

/// All rational roots of a polynomial over Q, with multiplicities.
pub fn rational_roots(p: &Polynomial<Rational>) -> RootReport<Rational> {
    assert!(!p.is_zero(), "root search requires a nonzero polynomial");
    let mut roots: Vec<(Rational, usize)> = Vec::new();
    let (v, mut q) = p.strip_x_power();
    if v > 0 {
        roots.push((Rational::zero(), v));
    }
    if q.degree_or_zero() == 0 {
        return RootReport { roots, leftover: q };
    }
    // Clear denominators to an integer-coefficient polynomial.
    let mut denom_lcm = BigInt::one();
    for c in q.coeffs() {
        denom_lcm = denom_lcm.lcm(c.denom());
    }
    let scaled = Rational::from_big(denom_lcm, BigInt::one());
    let int_poly = q.scale(&scaled);
    let c0 = int_poly.coeff(0);
    let cn = int_poly.leading().unwrap().clone();
    let num_divs = positive_divisors(c0.numer());
    let den_divs = positive_divisors(cn.numer());
    let mut candidates: Vec<Rational> = Vec::new();
    for nu in &num_divs {
        for de in &den_divs {
            let r = Rational::from_big(nu.clone(), de.clone());
            candidates.push(r.clone());
            candidates.push(-r);
        }
    }
    candidates.sort_by(|a, b| {
        a.inner()
            .partial_cmp(b.inner())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    candidates.dedup();
    for cand in candidates {
        if q.degree_or_zero() == 0 {
            break;
        }
        if q.eval(&cand).is_zero() {
            let (mult, deflated) = deflate(&q, &cand);
            debug_assert!(mult > 0);
            roots.push((cand, mult));
            q = deflated;
        }
    }
    RootReport { roots, leftover: q }
}

/// Product in the ring (Q[u,v])[w] / (w^2 + w + 1), elements as (1, w) parts.
fn omega_pair_mul(
    a: &(MultiPoly<Rational>, MultiPoly<Rational>),
    b: &(MultiPoly<Rational>, MultiPoly<Rational>),
) -> (MultiPoly<Rational>, MultiPoly<Rational>) {
    let (a1, aw) = a;
    let (b1, bw) = b;
    let re = a1.mul(b1).sub(&aw.mul(bw));
    let om = a1.mul(bw).add(&aw.mul(b1)).sub(&aw.mul(bw));
    (re, om)
}

/// Expand p(u + v*w) into its 1- and w-components as polynomials in (u, v).
fn split_omega_substitution(
    p: &Polynomial<OmegaRational>,
) -> (MultiPoly<Rational>, MultiPoly<Rational>) {
    let u = MultiPoly::var(2, 0);
    let v = MultiPoly::var(2, 1);
    let zero = MultiPoly::zero(2);
    let x_sub = (u, v); // u + v*w
    let mut acc = (zero.clone(), zero.clone());
    let mut x_pow = (MultiPoly::one(2), zero.clone());
    for c in p.coeffs() {
        let coeff = (
            MultiPoly::constant(2, c.re.clone()),
            MultiPoly::constant(2, c.om.clone()),
        );
        let term = omega_pair_mul(&coeff, &x_pow);
        acc = (acc.0.add(&term.0), acc.1.add(&term.1));
        x_pow = omega_pair_mul(&x_pow, &x_sub);
    }
    acc
}

/// The squarefree part `p / gcd(p, p')`, which has the same roots with
/// multiplicity one.  Shrinking the degree this way before the two-variable
/// elimination keeps the pseudo-remainder sequence small.
fn squarefree_part<K: Scalar>(p: &Polynomial<K>) -> Polynomial<K> {
    let d = p.derivative();
    if d.is_zero() {
        return p.clone();
    }
    let g = p.gcd(&d);
    if g.degree_or_zero() == 0 {
        p.clone()
    } else {
        p.divmod(&g).0
    }
}

/// All roots in Q(w) of a polynomial over Q(w), with multiplicities.
pub fn omega_roots(p: &Polynomial<OmegaRational>) -> RootReport<OmegaRational> {
    assert!(!p.is_zero(), "root search requires a nonzero polynomial");
    let mut roots: Vec<(OmegaRational, usize)> = Vec::new();
    let (v, mut q) = p.strip_x_power();
    if v > 0 {
        roots.push((OmegaRational::zero(), v));
    }
    if q.degree_or_zero() == 0 {
        return RootReport { roots, leftover: q };
    }
    let (a, b) = split_omega_substitution(&squarefree_part(&q));
    // Candidate w-parts: rational roots of the u-eliminant of (A, B).
    let mut v_candidates: Vec<Rational> = vec![Rational::zero()];
    let elim = if a.contains_var(0) || b.contains_var(0) {
        if a.contains_var(0) && b.contains_var(0) {
            eliminant(&a, &b, 0)
        } else if a.contains_var(0) {
            b.clone()
        } else {
            a.clone()
        }
    } else {
        // Neither component involves u: p is constant in u, impossible for
        // a nonconstant polynomial.
        unreachable!("nonconstant polynomial must involve the candidate root");
    };
    if let Some((var, univ)) = elim.single_variable() {
        if var == 1 && !univ.is_zero() {
            for (r, _) in rational_roots(&univ).roots {
                v_candidates.push(r);
            }
        }
    } else if let Some(c) = elim.as_constant() {
        if c.is_zero() {
            // Degenerate elimination cannot happen for finitely many roots,
            // but fall through with only the rational slice to stay safe.
        }
    }
    v_candidates.sort_by(|x, y| {
        x.inner()
            .partial_cmp(y.inner())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    v_candidates.dedup();
    let mut found: Vec<OmegaRational> = Vec::new();
    for v0 in v_candidates {
        // Specialize both components at v = v0; common rational roots in u.
        let a_v = a.substitute_scalar(1, &v0);
        let b_v = b.substitute_scalar(1, &v0);
        let to_poly = |m: &MultiPoly<Rational>| -> Option<Polynomial<Rational>> {
            if m.is_zero() {
                return None;
            }
            if let Some(c) = m.as_constant() {
                return Some(Polynomial::constant(c));
            }
            let (var, p) = m.single_variable()?;
            if var == 0 {
                Some(p)
            } else {
                None
            }
        };
        let pa = to_poly(&a_v);
        let pb = to_poly(&b_v);
        let g = match (pa, pb) {
            (Some(x), Some(y)) => {
                if x.is_zero() {
                    y
                } else if y.is_zero() {
                    x
                } else {
                    x.gcd(&y)
                }
            }
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (None, None) => continue,
        };
        if g.degree_or_zero() == 0 {
            continue;
        }
        for (u0, _) in rational_roots(&g).roots {
            let cand = OmegaRational {
                re: u0,
                om: v0.clone(),
            };
            if q.eval(&cand).is_zero() {
                found.push(cand);
            }
        }
    }
    found.sort_by_key(|r| (r.om.height(), r.re.height()));
    found.dedup();
    for cand in found {
        let (mult, deflated) = deflate(&q, &cand);
        if mult > 0 {
            roots.push((cand, mult));
            q = deflated;
        }
    }
    RootReport { roots, leftover: q }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{OmegaRational, Rational};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new_i64(n, d)
    }

    fn poly(coeffs: &[i64]) -> Polynomial<Rational> {
        Polynomial::from_coeffs(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    #[test]
    fn rational_roots_of_cubic() {
        // (3x - 1)(2x - 1)(x + 1) = 6x^3 + x^2 - 4x + 1
        let p = poly(&[1, -4, 1, 6]);
        let report = rational_roots(&p);
        assert!(report.splits());
        let mut roots: Vec<Rational> = report.roots.iter().map(|(r, _)| r.clone()).collect();
        roots.sort_by(|a, b| a.inner().partial_cmp(b.inner()).unwrap());
        assert_eq!(roots, vec![q(-1, 1), q(1, 3), q(1, 2)]);
    }

    #[test]
    fn multiplicities_and_zero_roots() {
        // x^2 (x - 2)^2 (3x + 1)
        let base = poly(&[0, 0, 1]);
        let double = poly(&[4, -4, 1]);
        let lin = poly(&[1, 3]);
        let p = &(&base * &double) * &lin;
        let report = rational_roots(&p);
        assert!(report.splits());
        let mut seen = report.roots.clone();
        seen.sort_by(|a, b| a.0.inner().partial_cmp(b.0.inner()).unwrap());
        assert_eq!(
            seen,
            vec![(q(-1, 3), 1), (Rational::zero(), 2), (q(2, 1), 2)]
        );
    }

    #[test]
    fn irreducible_leftover_is_reported() {
        // (x^2 + 1)(x - 1)
        let p = &poly(&[1, 0, 1]) * &poly(&[-1, 1]);
        let report = rational_roots(&p);
        assert_eq!(report.roots, vec![(q(1, 1), 1)]);
        assert_eq!(report.leftover.degree_or_zero(), 2);
        assert!(report.leftover.eval(&Rational::from(0)).is_one());
    }

    #[test]
    fn large_smooth_coefficients() {
        // 16807 x^3 - 9261 x^2 - 13851 x + 6561 has no rational roots.
        let p = poly(&[6561, -13851, -9261, 16807]);
        let report = rational_roots(&p);
        assert!(report.roots.is_empty());
        assert_eq!(report.leftover.degree_or_zero(), 3);
    }

    fn opoly(coeffs: &[OmegaRational]) -> Polynomial<OmegaRational> {
        Polynomial::from_coeffs(coeffs.to_vec())
    }

    fn o(n: i64) -> OmegaRational {
        OmegaRational::from_i64(n)
    }

    #[test]
    fn omega_roots_of_cyclotomic() {
        // x^2 + x + 1 has roots w and w^2 = -1 - w.
        let p = opoly(&[o(1), o(1), o(1)]);
        let report = omega_roots(&p);
        assert!(report.splits());
        let roots: Vec<OmegaRational> = report.roots.iter().map(|(r, _)| r.clone()).collect();
        assert!(roots.contains(&OmegaRational::omega()));
        assert!(roots.contains(&(-OmegaRational::one() - OmegaRational::omega())));
    }

    #[test]
    fn omega_roots_of_cube_minus_one() {
        let p = opoly(&[o(-1), o(0), o(0), o(1)]);
        let report = omega_roots(&p);
        assert!(report.splits());
        assert_eq!(report.count_with_multiplicity(), 3);
        assert!(report.roots.iter().any(|(r, _)| r.is_one()));
    }

    #[test]
    fn omega_roots_mixing_sqrt_minus_three() {
        // x^2 + 3 = (x - (1 + 2w))(x + (1 + 2w))
        let p = opoly(&[o(3), o(0), o(1)]);
        let report = omega_roots(&p);
        assert!(report.splits());
        let target = OmegaRational::one() + OmegaRational::omega() + OmegaRational::omega();
        assert!(report.roots.iter().any(|(r, _)| *r == target));
        assert!(report.roots.iter().any(|(r, _)| *r == -target.clone()));
    }

    #[test]
    fn omega_quadratic_from_covering_search() {
        // y^2 - 3y + 3 = (y - (2 + w))(y - (1 - w))
        let p = opoly(&[o(3), o(-3), o(1)]);
        let report = omega_roots(&p);
        assert!(report.splits());
        let r1 = OmegaRational::from_i64(2) + OmegaRational::omega();
        let r2 = OmegaRational::from_i64(1) - OmegaRational::omega();
        let roots: Vec<OmegaRational> = report.roots.iter().map(|(r, _)| r.clone()).collect();
        assert!(roots.contains(&r1));
        assert!(roots.contains(&r2));
    }

    #[test]
    fn omega_rational_only_roots() {
        // (x - 2)^2 over Q(w)
        let p = opoly(&[o(4), o(-4), o(1)]);
        let report = omega_roots(&p);
        assert_eq!(report.roots, vec![(o(2), 2)]);
    }

    #[test]
    fn omega_irreducible_leftover() {
        // x^2 - 2 has no roots in Q(w).
        let p = opoly(&[o(-2), o(0), o(1)]);
        let report = omega_roots(&p);
        assert!(report.roots.is_empty());
        assert_eq!(report.leftover.degree_or_zero(), 2);
    }
}
