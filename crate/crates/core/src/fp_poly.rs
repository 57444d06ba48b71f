//! Dense univariate polynomials over a prime field `F_p`, used both as exact
//! coefficients (`F_p[t]`) and, once truncated, as residues of `F_p[[t]]`.

use std::fmt;

/// A polynomial `c0 + c1*t + ...` with coefficients in `[0, p)`.
///
/// The coefficient vector never has trailing zeros; the zero polynomial is
/// the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime, so a^(p-2) is the inverse
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

impl FpPoly {
    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::constant(p, 1)
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Self::from_coeffs(p, vec![c])
    }

    /// Reduces an arbitrary signed integer into `F_p`.
    pub fn from_i128(p: u64, c: i128) -> Self {
        Self::constant(p, c.rem_euclid(p as i128) as u64)
    }

    /// `c * t^k`.
    pub fn monomial(p: u64, c: u64, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c % p;
        Self::from_coeffs(p, coeffs)
    }

    pub fn from_coeffs(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Index of the lowest nonzero coefficient (the `t`-adic valuation).
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.iter().position(|&c| c != 0).map(|i| i as u32)
    }

    /// Reduction modulo `t^k`.
    pub fn truncate(&self, k: u32) -> Self {
        let k = (k as usize).min(self.coeffs.len());
        Self::from_coeffs(self.p, self.coeffs[..k].to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| (self.coeff(i) + other.coeff(i)) % self.p)
            .collect();
        Self::from_coeffs(self.p, coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| (self.p - c) % self.p)
            .collect();
        Self::from_coeffs(self.p, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::from_coeffs(self.p, out)
    }

    /// Product reduced modulo `t^k`, skipping the discarded terms.
    pub fn mul_trunc(&self, other: &Self, k: u32) -> Self {
        let k = k as usize;
        let mut out = vec![0u64; k.min(self.coeffs.len() + other.coeffs.len())];
        for (i, &a) in self.coeffs.iter().enumerate().take(k) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(k - i) {
                out[i + j] = (out[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::from_coeffs(self.p, out)
    }

    pub fn scale(&self, c: u64) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| mul_mod(a, c, self.p)).collect();
        Self::from_coeffs(self.p, coeffs)
    }

    /// Division by `t^k`, dropping the low coefficients.
    pub fn shift_down(&self, k: u32) -> Self {
        let k = (k as usize).min(self.coeffs.len());
        Self::from_coeffs(self.p, self.coeffs[k..].to_vec())
    }

    /// Inverse of a unit (nonzero constant term) modulo `t^k`.
    pub fn inverse_trunc(&self, k: u32) -> Option<Self> {
        let c0 = self.coeff(0);
        if c0 == 0 {
            return None;
        }
        let inv0 = inv_mod(c0, self.p);
        let k = k as usize;
        let mut out = vec![0u64; k];
        for n in 0..k {
            // out[n] = -inv0 * sum_{i=1..n} a_i out[n-i], with out[0] = inv0
            let mut acc = if n == 0 { 1 } else { 0 };
            for i in 1..=n {
                acc = (acc + self.p - mul_mod(self.coeff(i), out[n - i], self.p)) % self.p;
            }
            out[n] = mul_mod(acc, inv0, self.p);
        }
        Some(Self::from_coeffs(self.p, out))
    }

    /// Quotient of an exact division in `F_p[t]`; `None` if `divisor` does
    /// not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(Self::zero(self.p));
        }
        let lead_inv = inv_mod(divisor.coeffs[dd], self.p);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return None;
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = mul_mod(rem[i + dd], lead_inv, self.p);
            quot[i] = q;
            if q != 0 {
                for (j, &d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = (rem[i + j] + self.p - mul_mod(q, d, self.p)) % self.p;
                }
            }
        }
        if rem.iter().any(|&c| c != 0) {
            return None;
        }
        Some(Self::from_coeffs(self.p, quot))
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// The polynomial whose coefficients are the base-`p` digits of `index`
    /// (lowest digit first). Enumerates `F_p[t]` in a fixed order.
    pub fn from_index(p: u64, mut index: u64) -> Self {
        let mut coeffs = Vec::new();
        while index > 0 {
            coeffs.push(index % p);
            index /= p;
        }
        Self::from_coeffs(p, coeffs)
    }
}

impl fmt::Display for FpPoly {
    /// Ascending powers of `t`; zero prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_product() {
        // (1 + t)(1 - t) = 1 - t^2 over F_5
        let a = FpPoly::from_coeffs(5, vec![1, 1]);
        let b = FpPoly::from_coeffs(5, vec![1, 4]);
        assert_eq!(a.mul_trunc(&b, 3), FpPoly::from_coeffs(5, vec![1, 0, 4]));
        assert_eq!(a.mul_trunc(&b, 2), FpPoly::one(5));
    }

    #[test]
    fn inverse_of_unit() {
        let a = FpPoly::from_coeffs(3, vec![2, 1, 1]);
        let inv = a.inverse_trunc(6).unwrap();
        assert_eq!(a.mul_trunc(&inv, 6), FpPoly::one(3));
        assert!(FpPoly::from_coeffs(3, vec![0, 1]).inverse_trunc(3).is_none());
    }

    #[test]
    fn exact_division() {
        let a = FpPoly::from_coeffs(5, vec![1, 2, 3]);
        let b = FpPoly::from_coeffs(5, vec![4, 0, 1]);
        assert_eq!(a.mul(&b).div_exact(&b), Some(a.clone()));
        assert_eq!(a.add(&FpPoly::one(5)).mul(&b).add(&FpPoly::one(5)).div_exact(&b), None);
    }

    #[test]
    fn valuation_and_display() {
        let a = FpPoly::from_coeffs(5, vec![0, 0, 1, 1]);
        assert_eq!(a.valuation(), Some(2));
        assert_eq!(a.to_string(), "t^2 + t^3");
        assert_eq!(FpPoly::from_coeffs(5, vec![3, 2, 4]).to_string(), "3 + 2*t + 4*t^2");
        assert_eq!(FpPoly::from_index(5, 7), FpPoly::from_coeffs(5, vec![2, 1]));
    }
}
