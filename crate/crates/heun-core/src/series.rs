//! Truncated power series (jets) at x = 0 over an exact scalar field.
//!
//! A series of order N stores the coefficients of x^0 .. x^N exactly; all
//! arithmetic truncates to the smaller operand order. There is no Laurent
//! support — functions with a pole at the expansion point must be handled
//! by the caller (see [`crate::ratfun`], which reports the pole order).
//!
//! Provides: addition, Cauchy multiplication, inversion, composition
//! (inner constant term must vanish), integer powers, and powers with an
//! arbitrary scalar exponent for unit series (constant term 1), which is
//! how prefactors like `(1-4*x/3)^(-3*a)` become jets.

use crate::poly::Polynomial;
use crate::scalar::Scalar;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    /// Inversion or division needs a nonzero constant term.
    #[error("series has zero constant term, not invertible")]
    ZeroConstantTerm,
    /// Scalar-exponent powers are defined here only for unit series.
    #[error("series power with scalar exponent requires constant term 1, found {found}")]
    NonUnitConstantTerm { found: String },
    /// Composition g(f(x)) needs f(0) = 0 to stay a power series.
    #[error("inner series of a composition must have zero constant term, found {found}")]
    InnerConstantNonzero { found: String },
}

/// Jet `coeffs[0] + coeffs[1]*x + ... + coeffs[N]*x^N`; the order N is
/// `coeffs.len() - 1` and trailing zeros are significant (they assert the
/// coefficient is known to vanish).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries<K: Scalar> {
    coeffs: Vec<K>,
}

impl<K: Scalar> TruncatedSeries<K> {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![K::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = K::one();
        s
    }

    pub fn x(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = K::one();
        }
        s
    }

    pub fn constant(c: K, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn from_coeffs(coeffs: Vec<K>) -> Self {
        assert!(!coeffs.is_empty(), "a jet has at least the constant term");
        TruncatedSeries { coeffs }
    }

    pub fn from_polynomial(p: &Polynomial<K>, order: usize) -> Self {
        let mut s = Self::zero(order);
        for i in 0..=order {
            s.coeffs[i] = p.coeff(i);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(K::zero)
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// First index with nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        TruncatedSeries {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=n).map(|i| self.coeff(i) + rhs.coeff(i)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=n).map(|i| self.coeff(i) - rhs.coeff(i)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let mut coeffs = vec![K::zero(); n + 1];
        for i in 0..=n {
            if self.coeff(i).is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                let t = coeffs[i + j].clone() + self.coeff(i) * rhs.coeff(j);
                coeffs[i + j] = t;
            }
        }
        TruncatedSeries { coeffs }
    }

    /// Multiplication by x^k; top coefficients fall off the truncation order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut coeffs = vec![K::zero(); n + 1];
        for i in k..=n {
            coeffs[i] = self.coeff(i - k);
        }
        TruncatedSeries { coeffs }
    }

    /// Product with a polynomial, keeping every exactly-known coefficient:
    /// the result order is `self.order() + valuation(p)`, the largest order
    /// to which the product is determined by this jet.
    pub fn mul_polynomial(&self, p: &Polynomial<K>) -> Self {
        let v = match p.valuation() {
            Some(v) => v,
            None => return Self::zero(self.order()),
        };
        let n = self.order() + v;
        let mut coeffs = vec![K::zero(); n + 1];
        for (i, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for j in 0..=self.order() {
                if i + j > n {
                    break;
                }
                let t = coeffs[i + j].clone() + c.clone() * self.coeff(j);
                coeffs[i + j] = t;
            }
        }
        TruncatedSeries { coeffs }
    }

    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        TruncatedSeries {
            coeffs: (1..=self.order())
                .map(|i| self.coeff(i) * K::from_i64(i as i64))
                .collect(),
        }
    }

    /// Reciprocal via the standard convolution recurrence.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let a0 = self.coeff(0);
        let a0_inv = a0.inv().ok_or(SeriesError::ZeroConstantTerm)?;
        let n = self.order();
        let mut out = vec![K::zero(); n + 1];
        out[0] = a0_inv.clone();
        for m in 1..=n {
            let mut acc = K::zero();
            for k in 1..=m {
                acc = acc + self.coeff(k) * out[m - k].clone();
            }
            out[m] = -(a0_inv.clone() * acc);
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&rhs.invert()?))
    }

    /// Composition `self(inner(x))`; requires `inner(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeff(0).is_zero() {
            return Err(SeriesError::InnerConstantNonzero {
                found: inner.coeff(0).to_string(),
            });
        }
        let n = self.order().min(inner.order());
        let mut acc = TruncatedSeries::zero(n);
        let inner_t = inner.truncate(n);
        for i in (0..=n).rev() {
            acc = acc.mul(&inner_t);
            let c = acc.coeff(0).clone() + self.coeff(i);
            acc.coeffs[0] = c;
        }
        acc
            .coeffs
            .resize_with(n + 1, K::zero);
        Ok(acc)
    }

    /// Integer power; negative exponents require an invertible constant term.
    pub fn pow_i64(&self, e: i64) -> Result<Self, SeriesError> {
        if e < 0 {
            return self.invert()?.pow_i64(-e);
        }
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Power `self^gamma` for an arbitrary scalar exponent, defined for unit
    /// series (constant term exactly 1) via the binomial recurrence
    ///
    /// ```text
    /// f = s^gamma  with  s*f' = gamma*s'*f
    /// (n+1) f_{n+1} = sum_{k=0}^{n} (gamma*(k+1)*s_{k+1}*f_{n-k})
    ///                 - sum_{k=1}^{n} (k)* ... (collected exactly below)
    /// ```
    pub fn pow_scalar(&self, gamma: &K) -> Result<Self, SeriesError> {
        if !self.coeff(0).is_one() {
            return Err(SeriesError::NonUnitConstantTerm {
                found: self.coeff(0).to_string(),
            });
        }
        let n = self.order();
        let mut f = vec![K::zero(); n + 1];
        f[0] = K::one();
        // From s f' = gamma s' f with s_0 = 1:
        // (m+1) f_{m+1} = sum_{k=0}^{m} (gamma (k+1) s_{k+1} f_{m-k})
        //               - sum_{k=1}^{m} s_k (m+1-k) f_{m+1-k}
        for m in 0..n {
            let mut acc = K::zero();
            for k in 0..=m {
                acc = acc
                    + gamma.clone()
                        * K::from_i64((k + 1) as i64)
                        * self.coeff(k + 1)
                        * f[m - k].clone();
            }
            for k in 1..=m {
                acc = acc - self.coeff(k) * K::from_i64((m + 1 - k) as i64) * f[m + 1 - k].clone();
            }
            let inv = K::from_i64((m + 1) as i64).inv().expect("nonzero integer");
            f[m + 1] = acc * inv;
        }
        Ok(TruncatedSeries { coeffs: f })
    }
}

impl<K: Scalar> fmt::Debug for TruncatedSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<K: Scalar> fmt::Display for TruncatedSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = Polynomial::from_coeffs(self.coeffs.clone());
        write!(f, "{} + O(x^{})", p.render(), self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, Scalar};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new_i64(n, d)
    }

    fn jet(cs: &[(i64, i64)]) -> TruncatedSeries<Rational> {
        TruncatedSeries::from_coeffs(cs.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn product_of_one_plus_x_and_one_minus_x() {
        let a = jet(&[(1, 1), (1, 1), (0, 1)]);
        let b = jet(&[(1, 1), (-1, 1), (0, 1)]);
        assert_eq!(a.mul(&b), jet(&[(1, 1), (0, 1), (-1, 1)]));
    }

    #[test]
    fn square_of_quadratic_jet() {
        // (1 + 2x + 3x^2)^2 = 1 + 4x + 10x^2 + O(x^3)
        let s = jet(&[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(s.mul(&s), jet(&[(1, 1), (4, 1), (10, 1)]));
    }

    #[test]
    fn truncation_to_smaller_order() {
        let a = jet(&[(1, 1), (1, 1)]);
        let b = jet(&[(1, 1), (1, 1), (1, 1), (1, 1)]);
        assert_eq!(a.mul(&b).order(), 1);
    }

    #[test]
    fn geometric_series_inverse() {
        // 1/(1-x) = 1 + x + x^2 + x^3
        let s = jet(&[(1, 1), (-1, 1), (0, 1), (0, 1)]);
        assert_eq!(
            s.invert().unwrap(),
            jet(&[(1, 1), (1, 1), (1, 1), (1, 1)])
        );
        assert_eq!(
            TruncatedSeries::<Rational>::x(3).invert(),
            Err(SeriesError::ZeroConstantTerm)
        );
    }

    #[test]
    fn binomial_square_root() {
        // (1+x)^(1/2) = 1 + x/2 - x^2/8 + O(x^3)
        let s = jet(&[(1, 1), (1, 1), (0, 1)]);
        assert_eq!(
            s.pow_scalar(&q(1, 2)).unwrap(),
            jet(&[(1, 1), (1, 2), (-1, 8)])
        );
    }

    #[test]
    fn scalar_power_requires_unit_constant() {
        let s = jet(&[(2, 1), (1, 1)]);
        assert!(matches!(
            s.pow_scalar(&q(1, 2)),
            Err(SeriesError::NonUnitConstantTerm { .. })
        ));
    }

    #[test]
    fn scalar_power_exponent_additivity() {
        let s = jet(&[(1, 1), (3, 2), (-1, 5), (2, 7), (1, 3)]);
        let g1 = q(2, 3);
        let g2 = q(-7, 4);
        let lhs = s.pow_scalar(&(&g1 + &g2)).unwrap();
        let rhs = s.pow_scalar(&g1).unwrap().mul(&s.pow_scalar(&g2).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn scalar_power_matches_integer_power() {
        let s = jet(&[(1, 1), (-4, 3), (1, 6), (0, 1), (2, 1)]);
        assert_eq!(
            s.pow_scalar(&q(3, 1)).unwrap(),
            s.pow_i64(3).unwrap()
        );
        assert_eq!(
            s.pow_scalar(&q(-2, 1)).unwrap(),
            s.pow_i64(-2).unwrap()
        );
    }

    #[test]
    fn composition_basic() {
        // (1 + z)o(x^2) = 1 + x^2
        let outer = jet(&[(1, 1), (1, 1), (0, 1)]);
        let inner = jet(&[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(outer.compose(&inner).unwrap(), jet(&[(1, 1), (0, 1), (1, 1)]));
        // geometric(2x): 1 + 2x + 4x^2
        let geo = jet(&[(1, 1), (1, 1), (1, 1)]);
        let two_x = jet(&[(0, 1), (2, 1), (0, 1)]);
        assert_eq!(geo.compose(&two_x).unwrap(), jet(&[(1, 1), (2, 1), (4, 1)]));
    }

    #[test]
    fn composition_exponential_jet() {
        // exp-jet o (x + x^2) = 1 + x + 3/2 x^2 + O(x^3)
        let e = jet(&[(1, 1), (1, 1), (1, 2)]);
        let inner = jet(&[(0, 1), (1, 1), (1, 1)]);
        assert_eq!(
            e.compose(&inner).unwrap(),
            jet(&[(1, 1), (1, 1), (3, 2)])
        );
    }

    #[test]
    fn composition_rejects_nonzero_inner_constant() {
        let outer = jet(&[(1, 1), (1, 1)]);
        let inner = jet(&[(1, 1), (1, 1)]);
        assert!(matches!(
            outer.compose(&inner),
            Err(SeriesError::InnerConstantNonzero { .. })
        ));
    }

    #[test]
    fn derivative_drops_order() {
        let s = jet(&[(5, 1), (3, 1), (7, 1)]);
        let d = s.derivative();
        assert_eq!(d, jet(&[(3, 1), (14, 1)]));
        assert_eq!(d.order(), 1);
    }

    #[test]
    fn omega_coefficients_work_through_generic_ops() {
        use crate::scalar::OmegaRational;
        let w = OmegaRational::omega();
        let s = TruncatedSeries::from_coeffs(vec![
            OmegaRational::one(),
            w.clone(),
            OmegaRational::zero(),
        ]);
        // (1 + w x)^3 = 1 + 3w x + 3w^2 x^2 + O(x^3)
        let cube = s.pow_i64(3).unwrap();
        assert_eq!(cube.coeff(1), w.clone() * OmegaRational::from_i64(3));
        assert_eq!(
            cube.coeff(2),
            w.clone() * w * OmegaRational::from_i64(3)
        );
    }
}
