//! Capped-absolute-precision arithmetic in `Z_p` and `F_p[[t]]`.
//!
//! Every element shares the context cap `N` and carries its own absolute
//! precision `k <= N`: the stored representative is only meaningful modulo
//! `π^k`, where `π` is the uniformizer (`p` or `t`). An element whose
//! representative is zero at its precision has no known valuation, only the
//! lower bound `k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::fp_poly::FpPoly;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} is too large (must be below 2^31)")]
    PrimeTooLarge(u64),
    #[error("precision cap must be at least 1")]
    ZeroCap,
    #[error("operands belong to different rings")]
    ContextMismatch,
    #[error("divisor valuation {divisor} exceeds dividend valuation {dividend}")]
    DivisionByHigherValuation { divisor: u32, dividend: u32 },
    #[error("divisor is zero at its precision {0}; its valuation cannot be certified")]
    IndeterminateDivisor(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    /// `Z_p`, uniformizer `p`.
    PAdic,
    /// `F_p[[t]]`, uniformizer `t`.
    Series,
}

/// Which ring we compute in and how many uniformizer digits are kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingContext {
    backend: Backend,
    p: u64,
    cap: u32,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl RingContext {
    pub fn new(backend: Backend, p: u64, cap: u32) -> Result<Self, RingError> {
        if p >= 1 << 31 {
            return Err(RingError::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        if cap == 0 {
            return Err(RingError::ZeroCap);
        }
        Ok(RingContext { backend, p, cap })
    }

    pub fn padic(p: u64, cap: u32) -> Result<Self, RingError> {
        Self::new(Backend::PAdic, p, cap)
    }

    pub fn series(p: u64, cap: u32) -> Result<Self, RingError> {
        Self::new(Backend::Series, p, cap)
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Same ring, different cap.
    pub fn with_cap(&self, cap: u32) -> Result<Self, RingError> {
        Self::new(self.backend, self.p, cap)
    }

    pub fn zero(&self) -> Scalar {
        self.scalar(0)
    }

    pub fn one(&self) -> Scalar {
        self.scalar(1)
    }

    /// The image of an integer in the exact coefficient ring.
    pub fn scalar(&self, c: i64) -> Scalar {
        self.scalar_from_bigint(&BigInt::from(c))
    }

    pub fn scalar_from_bigint(&self, c: &BigInt) -> Scalar {
        match self.backend {
            Backend::PAdic => Scalar::Int(c.clone()),
            Backend::Series => {
                let r = c.mod_floor(&BigInt::from(self.p));
                let r: u64 = r.try_into().expect("residue below p");
                Scalar::Series(FpPoly::constant(self.p, r))
            }
        }
    }

    pub fn uniformizer(&self) -> Scalar {
        self.uniformizer_pow(1)
    }

    pub fn uniformizer_pow(&self, k: u32) -> Scalar {
        match self.backend {
            Backend::PAdic => Scalar::Int(num_traits::pow(BigInt::from(self.p), k as usize)),
            Backend::Series => Scalar::Series(FpPoly::monomial(self.p, 1, k as usize)),
        }
    }

    /// Whether `s` is a scalar of this ring's backend (and prime).
    pub fn owns(&self, s: &Scalar) -> bool {
        match (self.backend, s) {
            (Backend::PAdic, Scalar::Int(_)) => true,
            (Backend::Series, Scalar::Series(a)) => a.modulus() == self.p,
            _ => false,
        }
    }

    /// Exact valuation of an exact scalar; `None` for zero.
    pub fn valuation_of(&self, s: &Scalar) -> Option<u32> {
        match s {
            Scalar::Int(a) => {
                if a.is_zero() {
                    return None;
                }
                let p = BigInt::from(self.p);
                let mut v = 0;
                let mut a = a.clone();
                loop {
                    let (q, r) = a.div_rem(&p);
                    if !r.is_zero() {
                        return Some(v);
                    }
                    a = q;
                    v += 1;
                }
            }
            Scalar::Series(a) => a.valuation(),
        }
    }

    fn modulus(&self, k: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.p), k as usize)
    }

    /// Canonical representative of `s` modulo `π^k`.
    pub fn reduce(&self, s: &Scalar, k: u32) -> Scalar {
        match s {
            Scalar::Int(a) => Scalar::Int(a.mod_floor(&self.modulus(k))),
            Scalar::Series(a) => Scalar::Series(a.truncate(k)),
        }
    }

    /// An exact scalar viewed at full precision.
    pub fn element(&self, s: &Scalar) -> ValuedElement {
        self.element_with_prec(s, self.cap)
    }

    pub fn element_with_prec(&self, s: &Scalar, prec: u32) -> ValuedElement {
        assert!(self.owns(s), "scalar does not belong to this ring");
        let prec = prec.min(self.cap);
        ValuedElement { ctx: *self, value: self.reduce(s, prec), prec }
    }

    pub fn int(&self, c: i64) -> ValuedElement {
        self.element(&self.scalar(c))
    }

    pub fn zero_element(&self) -> ValuedElement {
        self.int(0)
    }

    /// Inverse of a unit modulo `π^prec`.
    fn unit_inverse(&self, unit: &Scalar, prec: u32) -> Scalar {
        match unit {
            Scalar::Int(a) => {
                let m = self.modulus(prec);
                if prec == 0 {
                    return Scalar::Int(BigInt::zero());
                }
                let inv = a.mod_floor(&m).modinv(&m).expect("argument is a unit");
                Scalar::Int(inv)
            }
            Scalar::Series(a) => {
                if prec == 0 {
                    return Scalar::Series(FpPoly::zero(self.p));
                }
                Scalar::Series(a.inverse_trunc(prec).expect("argument is a unit"))
            }
        }
    }

    fn mul_mod(&self, a: &Scalar, b: &Scalar, prec: u32) -> Scalar {
        match (a, b) {
            (Scalar::Series(x), Scalar::Series(y)) => Scalar::Series(x.mul_trunc(y, prec)),
            _ => self.reduce(&(a * b), prec),
        }
    }

    /// Divides a scalar known to be divisible by `π^k`.
    fn shift_down(&self, s: &Scalar, k: u32) -> Scalar {
        match s {
            Scalar::Int(a) => Scalar::Int(a / self.modulus(k)),
            Scalar::Series(a) => Scalar::Series(a.shift_down(k)),
        }
    }
}

impl fmt::Display for RingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.backend {
            Backend::PAdic => write!(f, "Z_{} (cap {})", self.p, self.cap),
            Backend::Series => write!(f, "F_{}[[t]] (cap {})", self.p, self.cap),
        }
    }
}

/// The valuation of a finite-precision element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(u32),
    /// The element is zero at its precision; only a lower bound is known.
    AtLeast(u32),
}

impl Valuation {
    pub fn lower_bound(self) -> u32 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn exact(self) -> Option<u32> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    /// Valuation of a sum of components (the min in the ultrametric sense).
    /// An exact value wins ties against an equal lower bound.
    pub fn min(self, other: Valuation) -> Valuation {
        use Valuation::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Exact(a.min(b)),
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
            (Exact(a), AtLeast(b)) | (AtLeast(b), Exact(a)) => {
                if a <= b {
                    Exact(a)
                } else {
                    AtLeast(b)
                }
            }
        }
    }

    /// Min-valuation of a vector; `None` for an empty slice.
    pub fn of_vector(xs: &[ValuedElement]) -> Option<Valuation> {
        xs.iter().map(ValuedElement::valuation).reduce(Valuation::min)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, "≥ {v}"),
        }
    }
}

/// A ring element known modulo `π^prec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValuedElement {
    ctx: RingContext,
    value: Scalar,
    prec: u32,
}

impl ValuedElement {
    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    /// Canonical representative modulo `π^precision`.
    pub fn value(&self) -> &Scalar {
        &self.value
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn valuation(&self) -> Valuation {
        match self.ctx.valuation_of(&self.value) {
            Some(v) => Valuation::Exact(v),
            None => Valuation::AtLeast(self.prec),
        }
    }

    /// Zero at its precision.
    pub fn is_indeterminate_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Exact(0)
    }

    /// Certified membership in the maximal ideal.
    pub fn in_maximal_ideal(&self) -> bool {
        self.valuation().lower_bound() >= 1
    }

    /// Certified membership in `scale · m`, i.e. valuation at least
    /// `v(scale) + 1`. A zero `scale` admits nothing.
    pub fn in_scaled_maximal_ideal(&self, scale: &Scalar) -> bool {
        match self.ctx.valuation_of(scale) {
            Some(v) => self.valuation().lower_bound() > v,
            None => false,
        }
    }

    /// The same element known to fewer digits.
    pub fn reduce_to(&self, prec: u32) -> ValuedElement {
        let prec = prec.min(self.prec);
        ValuedElement { ctx: self.ctx, value: self.ctx.reduce(&self.value, prec), prec }
    }

    /// Whether both elements are known to `prec` digits and agree there.
    pub fn agrees_with(&self, other: &ValuedElement, prec: u32) -> bool {
        self.ctx == other.ctx
            && self.prec >= prec
            && other.prec >= prec
            && self.ctx.reduce(&self.value, prec) == self.ctx.reduce(&other.value, prec)
    }

    fn check(&self, other: &ValuedElement) -> Result<(), RingError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(RingError::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &ValuedElement) -> Result<ValuedElement, RingError> {
        self.check(other)?;
        let prec = self.prec.min(other.prec);
        Ok(ValuedElement { ctx: self.ctx, value: self.ctx.reduce(&(&self.value + &other.value), prec), prec })
    }

    pub fn try_sub(&self, other: &ValuedElement) -> Result<ValuedElement, RingError> {
        self.check(other)?;
        let prec = self.prec.min(other.prec);
        Ok(ValuedElement { ctx: self.ctx, value: self.ctx.reduce(&(&self.value - &other.value), prec), prec })
    }

    /// Product; precision `min(k_a + v(b), k_b + v(a), cap)`.
    pub fn try_mul(&self, other: &ValuedElement) -> Result<ValuedElement, RingError> {
        self.check(other)?;
        let va = self.valuation().lower_bound();
        let vb = other.valuation().lower_bound();
        let prec = (self.prec + vb).min(other.prec + va).min(self.ctx.cap);
        Ok(ValuedElement { ctx: self.ctx, value: self.ctx.mul_mod(&self.value, &other.value, prec), prec })
    }

    /// The quotient `c` with `divisor · c = self`.
    ///
    /// Loses `v(divisor)` digits of absolute precision:
    /// `k_c = min(k_a - v(b), k_b - 2 v(b) + v(a))`, which is `k_a - v(b)`
    /// whenever the divisor is known at least as well as the dividend
    /// relative to their valuations.
    pub fn div_exact(&self, divisor: &ValuedElement) -> Result<ValuedElement, RingError> {
        self.check(divisor)?;
        let vb = match divisor.valuation() {
            Valuation::Exact(v) => v,
            Valuation::AtLeast(k) => return Err(RingError::IndeterminateDivisor(k)),
        };
        let va = self.valuation().lower_bound();
        if va < vb {
            return Err(RingError::DivisionByHigherValuation { divisor: vb, dividend: va });
        }
        let prec = (self.prec - vb).min(divisor.prec + va - 2 * vb);
        let num = self.ctx.shift_down(&self.value, vb);
        let den = self.ctx.shift_down(&divisor.value, vb);
        let inv = self.ctx.unit_inverse(&den, prec);
        let value = self.ctx.mul_mod(&num, &inv, prec);
        Ok(ValuedElement { ctx: self.ctx, value, prec })
    }

    pub fn neg(&self) -> ValuedElement {
        ValuedElement { ctx: self.ctx, value: self.ctx.reduce(&-&self.value, self.prec), prec: self.prec }
    }

    pub fn pow(&self, mut exp: u32) -> ValuedElement {
        let mut base = self.clone();
        let mut acc = self.ctx.element(&self.ctx.one());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl Add for &ValuedElement {
    type Output = ValuedElement;
    fn add(self, rhs: &ValuedElement) -> ValuedElement {
        self.try_add(rhs).expect("ring context mismatch")
    }
}

impl Sub for &ValuedElement {
    type Output = ValuedElement;
    fn sub(self, rhs: &ValuedElement) -> ValuedElement {
        self.try_sub(rhs).expect("ring context mismatch")
    }
}

impl Mul for &ValuedElement {
    type Output = ValuedElement;
    fn mul(self, rhs: &ValuedElement) -> ValuedElement {
        self.try_mul(rhs).expect("ring context mismatch")
    }
}

impl Neg for &ValuedElement {
    type Output = ValuedElement;
    fn neg(self) -> ValuedElement {
        ValuedElement::neg(self)
    }
}

impl fmt::Display for ValuedElement {
    /// `c mod p^k` for `Z_p`, `c0 + c1*t + ... + O(t^k)` for `F_p[[t]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Scalar::Int(c) => write!(f, "{} mod {}^{}", c, self.ctx.p, self.prec),
            Scalar::Series(c) if c.is_zero() => write!(f, "O(t^{})", self.prec),
            Scalar::Series(c) => write!(f, "{} + O(t^{})", c, self.prec),
        }
    }
}

/// Renders a vector as `(a, b, ...)`, or the bare element when it has one
/// component.
pub fn format_vector(xs: &[ValuedElement]) -> String {
    if xs.len() == 1 {
        return xs[0].to_string();
    }
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Lifts exact scalars to full-precision elements.
pub fn elements(ctx: &RingContext, xs: &[Scalar]) -> Vec<ValuedElement> {
    xs.iter().map(|x| ctx.element(x)).collect()
}

/// Every component is certified to have valuation at least `prec`.
pub fn vector_vanishes_to(xs: &[ValuedElement], prec: u32) -> bool {
    xs.iter().all(|x| x.valuation().lower_bound() >= prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z5(cap: u32) -> RingContext {
        RingContext::padic(5, cap).unwrap()
    }

    #[test]
    fn context_validation() {
        assert_eq!(RingContext::padic(4, 2), Err(RingError::NotPrime(4)));
        assert_eq!(RingContext::padic(5, 0), Err(RingError::ZeroCap));
        assert_eq!(RingContext::series(1, 3), Err(RingError::NotPrime(1)));
        assert_eq!(RingContext::padic(1 << 31, 1), Err(RingError::PrimeTooLarge(1 << 31)));
        assert!(RingContext::padic(2147483647, 1).is_ok());
    }

    #[test]
    fn addition_below_modulus() {
        let r = z5(4);
        let s = &r.int(13) + &r.int(14);
        assert_eq!(s.value(), &r.scalar(27));
        assert_eq!(s.precision(), 4);
        assert_eq!(s.to_string(), "27 mod 5^4");
    }

    #[test]
    fn product_vanishing_at_cap() {
        let r = z5(4);
        let prod = &r.int(250) * &r.int(250);
        assert!(prod.is_indeterminate_zero());
        assert_eq!(prod.valuation(), Valuation::AtLeast(4));
    }

    #[test]
    fn series_truncated_product() {
        let r = RingContext::series(5, 3).unwrap();
        let a = r.element(&Scalar::Series(FpPoly::from_coeffs(5, vec![1, 1])));
        let b = r.element(&Scalar::Series(FpPoly::from_coeffs(5, vec![1, 4])));
        let c = &a * &b;
        assert_eq!(c.value(), &Scalar::Series(FpPoly::from_coeffs(5, vec![1, 0, 4])));
        assert_eq!(c.to_string(), "1 + 4*t^2 + O(t^3)");
    }

    #[test]
    fn division_examples() {
        let r = z5(4);
        let q = r.int(250).div_exact(&r.int(25)).unwrap();
        assert_eq!(q.value(), &r.scalar(10));
        assert_eq!(q.precision(), 2);

        let r3 = z5(3);
        let q = r3.int(7).div_exact(&r3.int(2)).unwrap();
        assert_eq!(q.value(), &r3.scalar(66));
        // independent check: 2 * 66 = 132 = 7 + 125
        assert_eq!((2 * 66) % 125, 7);

        assert_eq!(
            r.int(5).div_exact(&r.int(25)),
            Err(RingError::DivisionByHigherValuation { divisor: 2, dividend: 1 })
        );
        let zero = r.element_with_prec(&r.scalar(0), 2);
        assert_eq!(r.int(5).div_exact(&zero), Err(RingError::IndeterminateDivisor(2)));
    }

    #[test]
    fn valuation_examples() {
        let r = z5(4);
        assert_eq!(r.int(250).valuation(), Valuation::Exact(3));
        assert_eq!(r.int(0).valuation(), Valuation::AtLeast(4));
        let s = RingContext::series(5, 6).unwrap();
        let x = s.element(&Scalar::Series(FpPoly::from_coeffs(5, vec![0, 0, 1, 1])));
        assert_eq!(x.valuation(), Valuation::Exact(2));
    }

    #[test]
    fn negative_representatives_are_normalized() {
        let r = z5(2);
        assert_eq!(r.int(-1).value(), &r.scalar(24));
        assert_eq!(r.int(-1), r.int(24));
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = z5(4).int(1);
        let b = z5(3).int(1);
        assert_eq!(a.try_add(&b), Err(RingError::ContextMismatch));
        assert_eq!(a.try_mul(&b), Err(RingError::ContextMismatch));
        assert_eq!(a.div_exact(&b), Err(RingError::ContextMismatch));
    }

    #[test]
    fn membership_predicates() {
        let r = z5(4);
        assert!(r.int(3).is_unit());
        assert!(!r.int(3).in_maximal_ideal());
        assert!(r.int(10).in_maximal_ideal());
        assert!(r.int(50).in_scaled_maximal_ideal(&r.scalar(5)));
        assert!(!r.int(10).in_scaled_maximal_ideal(&r.scalar(5)));
        assert!(r.int(0).in_scaled_maximal_ideal(&r.scalar(25)));
    }

    #[test]
    fn min_valuation_prefers_exact() {
        use Valuation::*;
        assert_eq!(Exact(2).min(AtLeast(2)), Exact(2));
        assert_eq!(Exact(3).min(AtLeast(2)), AtLeast(2));
        assert_eq!(AtLeast(3).min(AtLeast(2)), AtLeast(2));
    }
}
