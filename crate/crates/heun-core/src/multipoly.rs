//! Sparse multivariate polynomials over an exact scalar field, sized for
//! the small elimination problems that arise when solving for coverings
//! with prescribed branching (a handful of variables, low degree).
//!
//! Supplies ring arithmetic, substitution of scalars and of polynomial
//! fractions (with denominator clearing), univariate views, and a
//! pseudo-remainder eliminant used for variable elimination. Everything a
//! solution candidate claims is re-verified against the original system,
//! so the elimination layer only needs to be sound for candidate
//! generation and for `nonzero constant in the ideal` certificates.

use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// Monomial exponent vector; length equals the ambient variable count.
pub type Exponents = Vec<u16>;

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly<K: Scalar> {
    pub nvars: usize,
    terms: BTreeMap<Exponents, K>,
}

impl<K: Scalar> MultiPoly<K> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: K) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, K::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, K::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<K> {
        if self.terms.is_empty() {
            return Some(K::zero());
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            if e.iter().all(|&k| k == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &K)> {
        self.terms.iter()
    }

    fn insert_term(&mut self, e: Exponents, c: K) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                let s = existing.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in rhs.terms.iter() {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in self.terms.iter() {
            for (e2, c2) in rhs.terms.iter() {
                let e: Exponents = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                out.insert_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn degree_in(&self, var: usize) -> usize {
        self.terms
            .keys()
            .map(|e| e[var] as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn vars_present(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.contains_var(v)).collect()
    }

    pub fn eval(&self, point: &[K]) -> K {
        assert_eq!(point.len(), self.nvars);
        let mut acc = K::zero();
        for (e, c) in self.terms.iter() {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t * point[v].pow_i64(k as i64).unwrap();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitute a scalar for one variable.
    pub fn substitute_scalar(&self, var: usize, value: &K) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in self.terms.iter() {
            let k = e[var];
            let mut e2 = e.clone();
            e2[var] = 0;
            let factor = value.pow_i64(k as i64).unwrap();
            out.insert_term(e2, c.clone() * factor);
        }
        out
    }

    /// View as a univariate polynomial in `var`: coefficient list (by
    /// ascending power of `var`) of polynomials in the remaining variables.
    pub fn as_univariate(&self, var: usize) -> Vec<MultiPoly<K>> {
        let d = self.degree_in(var);
        let mut out = vec![Self::zero(self.nvars); d + 1];
        for (e, c) in self.terms.iter() {
            let k = e[var] as usize;
            let mut e2 = e.clone();
            e2[var] = 0;
            out[k].insert_term(e2, c.clone());
        }
        out
    }

    pub fn from_univariate(nvars: usize, var: usize, coeffs: &[MultiPoly<K>]) -> Self {
        let mut out = Self::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, coeff) in c.terms.iter() {
                let mut e2 = e.clone();
                e2[var] += k as u16;
                out.insert_term(e2, coeff.clone());
            }
        }
        out
    }

    /// Substitute `var = num/den`, clearing denominators: returns
    /// `den^deg * self` with the substitution applied (same zero set on the
    /// locus `den != 0`).
    pub fn substitute_fraction(&self, var: usize, num: &Self, den: &Self) -> Self {
        let coeffs = self.as_univariate(var);
        let d = coeffs.len() - 1;
        let mut out = Self::zero(self.nvars);
        let mut num_pow = Self::one(self.nvars);
        let mut den_pows: Vec<Self> = Vec::with_capacity(d + 1);
        let mut dp = Self::one(self.nvars);
        for _ in 0..=d {
            den_pows.push(dp.clone());
            dp = dp.mul(den);
        }
        for (k, c) in coeffs.iter().enumerate() {
            let term = c.mul(&num_pow).mul(&den_pows[d - k]);
            out = out.add(&term);
            num_pow = num_pow.mul(num);
        }
        out
    }

    /// If the polynomial involves exactly one variable, return it with its
    /// dense univariate coefficients.
    pub fn single_variable(&self) -> Option<(usize, crate::poly::Polynomial<K>)> {
        let vars = self.vars_present();
        if vars.len() != 1 {
            return None;
        }
        let v = vars[0];
        let coeffs = self
            .as_univariate(v)
            .into_iter()
            .map(|c| c.as_constant().expect("only one variable present"))
            .collect();
        Some((v, crate::poly::Polynomial::from_coeffs(coeffs)))
    }
}

impl<K: Scalar> fmt::Debug for MultiPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["z0", "z1", "z2", "z3", "z4", "z5", "z6", "z7", "z8", "z9"];
        let mut first = true;
        for (e, c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    write!(f, "*{}^{}", names.get(v).unwrap_or(&"z?"), k)?;
                }
            }
        }
        Ok(())
    }
}

/// Pseudo-remainder of `a` by `b` with respect to `var`:
/// `lc(b)^(da-db+1) * a  mod  b`, staying in the ideal generated by a and b.
pub fn pseudo_rem<K: Scalar>(a: &MultiPoly<K>, b: &MultiPoly<K>, var: usize) -> MultiPoly<K> {
    let db = b.degree_in(var);
    assert!(b.contains_var(var), "divisor must involve the variable");
    let b_coeffs = b.as_univariate(var);
    let lc_b = b_coeffs[db].clone();
    let mut r = a.as_univariate(var);
    while r.len() > db && r.len() >= 1 {
        let dr = r.len() - 1;
        if r[dr].is_zero() {
            r.pop();
            continue;
        }
        if dr < db {
            break;
        }
        let shift = dr - db;
        let top = r[dr].clone();
        // r = lc_b * r - top * x^shift * b
        for c in r.iter_mut() {
            *c = c.mul(&lc_b);
        }
        for (j, bc) in b_coeffs.iter().enumerate() {
            let t = r[j + shift].sub(&top.mul(bc));
            r[j + shift] = t;
        }
        r.pop();
    }
    while r.last().map(|c| c.is_zero()).unwrap_or(false) {
        r.pop();
    }
    MultiPoly::from_univariate(a.nvars, var, &r)
}

/// Eliminate `var` from the pair (a, b) via the pseudo-remainder sequence.
/// The result is a polynomial in the remaining variables lying in the ideal
/// generated by a and b; it vanishes on every common solution, and a nonzero
/// constant certifies inconsistency over the algebraic closure.
pub fn eliminant<K: Scalar>(a: &MultiPoly<K>, b: &MultiPoly<K>, var: usize) -> MultiPoly<K> {
    let mut f = a.clone();
    let mut g = b.clone();
    if f.degree_in(var) < g.degree_in(var) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        if !g.contains_var(var) {
            return g;
        }
        let r = pseudo_rem(&f, &g, var);
        if r.is_zero() {
            // common factor involving var: no elimination information
            return MultiPoly::zero(a.nvars);
        }
        f = g;
        g = r;
    }
}
