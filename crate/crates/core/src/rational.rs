//! Arbitrary-precision rational numbers with dyadic predicates.
//!
//! Flow values are exact rationals throughout; "dyadic" (denominator a power
//! of two) and "integral" (denominator one) are exact predicates on the
//! reduced representation, which floating point cannot provide.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        ExactRational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `numerator / denominator`, reducing to lowest terms.
    /// `denominator` must be nonzero.
    pub fn new(numerator: i64, denominator: i64) -> Self {
        assert!(denominator != 0, "zero denominator");
        ExactRational(BigRational::new(
            BigInt::from(numerator),
            BigInt::from(denominator),
        ))
    }

    pub fn from_big(numerator: BigInt, denominator: BigInt) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        ExactRational(BigRational::new(numerator, denominator))
    }

    /// `k * 2^(-exp)`.
    pub fn dyadic(k: i64, exp: u64) -> Self {
        ExactRational(BigRational::new(
            BigInt::from(k),
            BigInt::from(BigUint::one() << exp),
        ))
    }

    /// `2^(-exp)`.
    pub fn pow2_inv(exp: u64) -> Self {
        Self::dyadic(1, exp)
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// True iff the reduced denominator is a power of two (including 1).
    pub fn is_dyadic(&self) -> bool {
        let d = self.0.denom().magnitude();
        d.count_ones() == 1
    }

    /// True iff the reduced denominator is 1.
    pub fn is_integral(&self) -> bool {
        self.0.denom().is_one()
    }

    /// For dyadic values, the exponent `e` with denominator `2^e`.
    /// Returns `None` for non-dyadic values.
    pub fn denominator_exponent(&self) -> Option<u64> {
        if self.is_dyadic() {
            Some(self.0.denom().magnitude().trailing_zeros().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    /// The multiple of `2^(-m)` nearest to `self`. On a midpoint tie the
    /// larger value is returned; ties only occur for dyadic inputs.
    pub fn round_to_dyadic(&self, m: u64) -> Self {
        let scale = BigInt::from(BigUint::one() << m);
        let scaled = &self.0 * &scale;
        // round half up: floor(x + 1/2)
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let k = (scaled + half).floor().to_integer();
        ExactRational(BigRational::new(k, scale))
    }

    /// Renders as `p/q`, or just `p` for integral values.
    pub fn to_fraction_string(&self) -> String {
        self.to_string()
    }

    /// Parses `p/q` or a bare integer `p`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let n: BigInt = num.parse().ok()?;
        let d: BigInt = match den {
            Some(d) => d.parse().ok()?,
            None => BigInt::one(),
        };
        if d.is_zero() || d.is_negative() {
            return None;
        }
        Some(ExactRational(BigRational::new(n, d)))
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&ExactRational> for ExactRational {
    fn add_assign(&mut self, rhs: &ExactRational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&ExactRational> for ExactRational {
    fn sub_assign(&mut self, rhs: &ExactRational) {
        self.0 -= &rhs.0;
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl ExactRational {
    pub fn cmp_abs(&self, other: &ExactRational) -> Ordering {
        self.0.abs().cmp(&other.0.abs())
    }

    pub fn sign(&self) -> Sign {
        self.0.numer().sign()
    }
}
