//! Dense univariate polynomials over an exact scalar field.
//!
//! Provides construction helpers, ring arithmetic, exact division with
//! remainder, monic gcd, resultants via the Euclidean remainder sequence,
//! Yun squarefree decomposition (the workhorse behind branching-pattern
//! analysis, which never needs actual root locations), and composition.

use crate::scalar::Scalar;
use std::fmt;

/// Polynomial `coeffs[0] + coeffs[1]*x + ...` with no trailing zero
/// coefficients; the zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<K: Scalar> {
    coeffs: Vec<K>,
}

impl<K: Scalar> Polynomial<K> {
    pub fn from_coeffs(mut coeffs: Vec<K>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Polynomial {
            coeffs: vec![K::one()],
        }
    }

    pub fn constant(c: K) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn x() -> Self {
        Polynomial {
            coeffs: vec![K::zero(), K::one()],
        }
    }

    /// `c0 + c1*x`.
    pub fn linear(c0: K, c1: K) -> Self {
        Self::from_coeffs(vec![c0, c1])
    }

    /// Monic product of `x - r` over the given roots.
    pub fn from_roots(roots: &[K]) -> Self {
        let mut p = Self::one();
        for r in roots {
            p = &p * &Self::linear(-r.clone(), K::one());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree treating zero as degree 0 (convenient for degree arithmetic).
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(K::zero)
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&K> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &K) -> K {
        let mut acc = K::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Multiplication by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![K::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    /// Order of vanishing at x = 0 (0 for nonzero constant term; `None` for
    /// the zero polynomial).
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Divide out the largest power of x, returning (power, quotient).
    pub fn strip_x_power(&self) -> (usize, Self) {
        match self.valuation() {
            None => (0, Self::zero()),
            Some(v) => (
                v,
                Polynomial {
                    coeffs: self.coeffs[v..].to_vec(),
                },
            ),
        }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * K::from_i64(i as i64))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    /// Exact Euclidean division: returns (quotient, remainder).
    pub fn divmod(&self, den: &Self) -> (Self, Self) {
        assert!(!den.is_zero(), "division by zero polynomial");
        let dd = den.degree().unwrap();
        let lead_inv = den.leading().unwrap().inv().expect("field element");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![K::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap().clone() * lead_inv.clone();
            if !factor.is_zero() {
                for (i, dc) in den.coeffs.iter().enumerate() {
                    let t = rem[k + i].clone() - factor.clone() * dc.clone();
                    rem[k + i] = t;
                }
                quot[k] = factor;
            }
            rem.pop();
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Quotient when the division is known to be exact; panics on nonzero
    /// remainder (internal misuse, not a data error).
    pub fn div_exact(&self, den: &Self) -> Self {
        let (q, r) = self.divmod(den);
        assert!(r.is_zero(), "division was not exact");
        q
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Resultant of `self` and `other` via the Euclidean remainder sequence.
    pub fn resultant(&self, other: &Self) -> K {
        if self.is_zero() || other.is_zero() {
            return K::zero();
        }
        let mut a = self.clone();
        let mut b = other.clone();
        let mut acc = K::one();
        loop {
            let da = a.degree().unwrap();
            let db = b.degree().unwrap();
            if da == 0 {
                // res(c, b) = c^{deg b}
                return acc * a.leading().unwrap().pow_i64(db as i64).unwrap();
            }
            if db == 0 {
                // res(a, c) = c^{deg a}
                return acc * b.leading().unwrap().pow_i64(da as i64).unwrap();
            }
            let (_, r) = a.divmod(&b);
            if r.is_zero() {
                return K::zero();
            }
            // res(a, b) = (-1)^{da*db} lc(b)^{da - dr} res(b, r)
            let dr = r.degree().unwrap();
            let mut factor = b
                .leading()
                .unwrap()
                .pow_i64(da as i64 - dr as i64)
                .unwrap();
            if (da * db) % 2 == 1 {
                factor = -factor;
            }
            acc = acc * factor;
            a = b;
            b = r;
        }
    }

    /// Yun squarefree decomposition: returns `(m_i, g_i)` with
    /// `self = lc * prod g_i^{m_i}`, the `g_i` monic, squarefree, pairwise
    /// coprime, listed with increasing `m_i` and `deg g_i >= 1`.
    pub fn squarefree_decomposition(&self) -> Vec<(usize, Self)> {
        let mut out = vec![];
        if self.degree_or_zero() == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0);
        let mut c = fp.div_exact(&a0);
        let mut m = 1usize;
        loop {
            let d = &c - &b.derivative();
            if d.is_zero() {
                if b.degree_or_zero() > 0 {
                    out.push((m, b.monic()));
                }
                break;
            }
            let g = b.gcd(&d);
            if g.degree_or_zero() > 0 {
                out.push((m, g.clone()));
            }
            b = b.div_exact(&g);
            c = d.div_exact(&g);
            m += 1;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
        }
        out
    }

    /// Multiset of root multiplicities over the algebraic closure, as
    /// `(multiplicity, number_of_roots)` pairs derived from the squarefree
    /// decomposition — no root finding involved.
    pub fn multiplicity_structure(&self) -> Vec<(usize, usize)> {
        self.squarefree_decomposition()
            .into_iter()
            .map(|(m, g)| (m, g.degree().unwrap()))
            .collect()
    }

    pub fn pow_usize(&self, e: usize) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Composition `self(inner(x))`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }

    /// Homogeneous evaluation `num^deg * self(den/num)`... more precisely
    /// `sum_i coeffs[i] * num^i * den^(d-i)` for `d = max(deg, min_deg)`,
    /// the numerator of `self(num/den)` cleared by `den^d`.
    pub fn compose_fraction(&self, num: &Self, den: &Self, clear_to: usize) -> Self {
        let d = clear_to.max(self.degree_or_zero());
        let mut acc = Self::zero();
        let mut den_pow = Self::one();
        // accumulate from highest coefficient down: acc = acc*num + c_i*den^{d-i}
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            let _ = i;
            acc = &(&acc * num) + &den_pow.scale(c);
            den_pow = &den_pow * den;
        }
        // account for clearing beyond the actual degree
        let extra = d - self.degree_or_zero();
        if extra > 0 {
            acc = &acc * &den.pow_usize(extra);
        }
        acc
    }

    /// Render with `x` as the variable, catalog-file syntax.
    pub fn render(&self) -> String {
        crate::poly::render_poly(self, "x")
    }
}

impl<K: Scalar> std::ops::Add for &Polynomial<K> {
    type Output = Polynomial<K>;
    fn add(self, rhs: &Polynomial<K>) -> Polynomial<K> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + rhs.coeff(i));
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl<K: Scalar> std::ops::Sub for &Polynomial<K> {
    type Output = Polynomial<K>;
    fn sub(self, rhs: &Polynomial<K>) -> Polynomial<K> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) - rhs.coeff(i));
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl<K: Scalar> std::ops::Mul for &Polynomial<K> {
    type Output = Polynomial<K>;
    fn mul(self, rhs: &Polynomial<K>) -> Polynomial<K> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![K::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let t = coeffs[i + j].clone() + a.clone() * b.clone();
                coeffs[i + j] = t;
            }
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl<K: Scalar> std::ops::Neg for &Polynomial<K> {
    type Output = Polynomial<K>;
    fn neg(self) -> Polynomial<K> {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<K: Scalar> fmt::Debug for Polynomial<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl<K: Scalar> fmt::Display for Polynomial<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Render a polynomial in catalog syntax with an arbitrary variable name.
pub fn render_poly<K: Scalar>(p: &Polynomial<K>, var: &str) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts: Vec<String> = vec![];
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cs = c.to_string();
        let needs_parens = cs.contains('+') || (cs.rfind('-').map(|k| k > 0).unwrap_or(false));
        let coeff_str = if needs_parens { format!("({cs})") } else { cs };
        let term = match i {
            0 => coeff_str,
            _ => {
                let xp = if i == 1 {
                    var.to_string()
                } else {
                    format!("{var}^{i}")
                };
                if c.is_one() {
                    xp
                } else if coeff_str == "-1" {
                    format!("-{xp}")
                } else {
                    format!("{coeff_str}*{xp}")
                }
            }
        };
        parts.push(term);
    }
    let mut out = String::new();
    for (k, t) in parts.iter().enumerate() {
        if k == 0 {
            out.push_str(t);
        } else if let Some(stripped) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(stripped);
        } else {
            out.push_str(" + ");
            out.push_str(t);
        }
    }
    out
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

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Polynomial::from_coeffs(vec![q(1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(p.degree(), Some(0));
        assert!(Polynomial::<Rational>::from_coeffs(vec![q(0, 1)]).is_zero());
    }

    #[test]
    fn mul_and_eval() {
        // (1 + x)(1 - x) = 1 - x^2
        let p = &poly(&[1, 1]) * &poly(&[1, -1]);
        assert_eq!(p, poly(&[1, 0, -1]));
        assert_eq!(p.eval(&q(3, 1)), q(-8, 1));
    }

    #[test]
    fn divmod_exact_and_remainder() {
        let num = poly(&[-1, 0, 0, 1]); // x^3 - 1
        let den = poly(&[-1, 1]); // x - 1
        let (quot, rem) = num.divmod(&den);
        assert_eq!(quot, poly(&[1, 1, 1]));
        assert!(rem.is_zero());

        let (_, rem2) = poly(&[1, 0, 1]).divmod(&poly(&[-2, 1]));
        assert_eq!(rem2, poly(&[5])); // x^2+1 at x=2
    }

    #[test]
    fn gcd_of_common_factor() {
        let a = &poly(&[-1, 1]) * &poly(&[2, 1]); // (x-1)(x+2)
        let b = &poly(&[-1, 1]) * &poly(&[5, 3]); // (x-1)(3x+5)
        assert_eq!(a.gcd(&b), poly(&[-1, 1]));
    }

    #[test]
    fn resultant_detects_common_roots() {
        let a = poly(&[-1, 1]); // x - 1
        let b = poly(&[-1, 0, 1]); // x^2 - 1
        assert!(a.resultant(&b).is_zero());
        // res(x^2+1, x-2) = 2^2 + 1 = 5 up to sign convention
        let r = poly(&[1, 0, 1]).resultant(&poly(&[-2, 1]));
        assert_eq!(r.abs_canonical(), q(5, 1));
    }

    #[test]
    fn squarefree_structure_of_marked_fiber() {
        // x^2 (x+3): one double root, one simple root.
        let p = &poly(&[0, 0, 1]) * &poly(&[3, 1]);
        let mut ms = p.multiplicity_structure();
        ms.sort();
        assert_eq!(ms, vec![(1, 1), (2, 1)]);
    }

    #[test]
    fn squarefree_structure_high_multiplicity() {
        // (x-1)^3 (x+2)^2 (x-5)
        let p = &(&poly(&[-1, 1]).pow_usize(3) * &poly(&[2, 1]).pow_usize(2)) * &poly(&[-5, 1]);
        let mut ms = p.multiplicity_structure();
        ms.sort();
        assert_eq!(ms, vec![(1, 1), (2, 1), (3, 1)]);
    }

    #[test]
    fn compose_fraction_clears_denominator() {
        // p(x) = x^2 + 1 at num/den cleared by den^2: num^2 + den^2
        let p = poly(&[1, 0, 1]);
        let num = poly(&[0, 1]);
        let den = poly(&[1, 1]);
        let out = p.compose_fraction(&num, &den, 2);
        assert_eq!(out, &(&num * &num) + &(&den * &den));
    }

    #[test]
    fn render_forms() {
        assert_eq!(poly(&[9, -24, 16]).render(), "9 - 24*x + 16*x^2");
        assert_eq!(poly(&[0, 1]).render(), "x");
        assert_eq!(poly(&[0, -1, 0, 2]).render(), "-x + 2*x^3");
        let half = Polynomial::from_coeffs(vec![q(1, 2), q(-3, 4)]);
        assert_eq!(half.render(), "1/2 - 3/4*x");
    }
}
