//! Exact scalars: arbitrary-precision integers for the p-adic backend and
//! polynomials over `F_p` for the power-series backend.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::fp_poly::FpPoly;

/// An exact coefficient. Never carries a precision.
///
/// Mixing the two variants in one operation is a logic error and panics;
/// every public entry point that can receive foreign data checks contexts
/// first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Int(BigInt),
    Series(FpPoly),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Int(a) => a.is_zero(),
            Scalar::Series(a) => a.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Int(a) => a.is_one(),
            Scalar::Series(a) => *a == FpPoly::one(a.modulus()),
        }
    }

    pub fn zero_like(&self) -> Scalar {
        match self {
            Scalar::Int(_) => Scalar::Int(BigInt::zero()),
            Scalar::Series(a) => Scalar::Series(FpPoly::zero(a.modulus())),
        }
    }

    pub fn one_like(&self) -> Scalar {
        match self {
            Scalar::Int(_) => Scalar::Int(BigInt::one()),
            Scalar::Series(a) => Scalar::Series(FpPoly::one(a.modulus())),
        }
    }

    /// Same backend as `self`, value `c`.
    pub fn int_like(&self, c: i64) -> Scalar {
        match self {
            Scalar::Int(_) => Scalar::Int(BigInt::from(c)),
            Scalar::Series(a) => Scalar::Series(FpPoly::from_i128(a.modulus(), c as i128)),
        }
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        match self {
            Scalar::Int(a) => Scalar::Int(num_traits::pow(a.clone(), exp as usize)),
            Scalar::Series(a) => Scalar::Series(a.pow(exp)),
        }
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Scalar) -> Option<Scalar> {
        match (self, divisor) {
            (Scalar::Int(a), Scalar::Int(b)) => {
                if b.is_zero() {
                    return None;
                }
                let (q, r) = a.div_rem(b);
                r.is_zero().then_some(Scalar::Int(q))
            }
            (Scalar::Series(a), Scalar::Series(b)) => a.div_exact(b).map(Scalar::Series),
            _ => panic!("scalar backend mismatch"),
        }
    }

    /// Whether the printed form has a leading minus sign.
    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Int(a) if a.is_negative())
    }

    /// Whether the printed form needs parentheses inside a product.
    pub fn is_compound(&self) -> bool {
        match self {
            Scalar::Int(_) => false,
            Scalar::Series(a) => a.coeffs().iter().filter(|&&c| c != 0).count() > 1,
        }
    }
}

fn binary(a: &Scalar, b: &Scalar, int_op: fn(&BigInt, &BigInt) -> BigInt, poly_op: fn(&FpPoly, &FpPoly) -> FpPoly) -> Scalar {
    match (a, b) {
        (Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(int_op(x, y)),
        (Scalar::Series(x), Scalar::Series(y)) => Scalar::Series(poly_op(x, y)),
        _ => panic!("scalar backend mismatch"),
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        binary(self, rhs, |x, y| x + y, FpPoly::add)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        binary(self, rhs, |x, y| x - y, FpPoly::sub)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        binary(self, rhs, |x, y| x * y, FpPoly::mul)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Int(a) => Scalar::Int(-a),
            Scalar::Series(a) => Scalar::Series(a.neg()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(a) => write!(f, "{a}"),
            Scalar::Series(a) => write!(f, "{a}"),
        }
    }
}
