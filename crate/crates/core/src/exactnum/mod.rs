//! Exact rational and dyadic arithmetic.
//!
//! A quantity is "finitely describable" in this crate when it is a dyadic
//! rational: its reduced denominator is a power of two. Every consistency
//! decision downstream goes through [`is_dyadic`] or [`Dyadic`].

mod fixed;
mod quadext;
mod squarefree;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use fixed::{rational_reconstruction, Fixed};
pub use quadext::{ExtClass, QuadExtElement};
pub use squarefree::{is_perfect_square, is_probable_prime, squarefree_decompose};

/// Exact fraction with arbitrary-precision numerator and denominator.
///
/// Always kept in lowest terms with a positive denominator; zero is `0/1`.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("cannot parse `{0}` as an exact rational")]
    Parse(String),
    #[error("decimal input `{0}` is not accepted here; use an exact fraction")]
    DecimalRejected(String),
    #[error("`{0}` is not a dyadic rational")]
    NotDyadic(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// Builds `num/den` from machine integers. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// True iff the reduced denominator is a power of two (including 1).
pub fn is_dyadic(r: &Rational) -> bool {
    is_power_of_two(r.denom())
}

/// Dyadic with at most `bits` binary places, i.e. denominator dividing `2^bits`.
pub fn is_dyadic_within(r: &Rational, bits: u32) -> bool {
    match Dyadic::try_from(r) {
        Ok(d) => d.exponent() <= bits,
        Err(_) => false,
    }
}

pub(crate) fn is_power_of_two(n: &BigInt) -> bool {
    n.sign() == Sign::Plus && n.magnitude().count_ones() == 1
}

/// Positive integer `2^k` as a rational.
pub fn pow2(k: u32) -> Rational {
    Rational::from_integer(BigInt::one() << k as usize)
}

/// Renders `r` in decimal with `digits` places after the point, rounding half
/// away from zero. Intended for reports only.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let num: BigInt = r.numer().abs() * &scale * 2 + r.denom();
    let scaled = num.div_floor(&(r.denom() * 2));
    format_scaled(r.is_negative() && !scaled.is_zero(), &scaled, digits)
}

pub(crate) fn format_scaled(negative: bool, scaled: &BigInt, digits: usize) -> String {
    let mut s = scaled.to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        s.insert(s.len() - digits, '.');
    }
    if negative {
        s.insert(0, '-');
    }
    s
}

/// Approximate `f64` value, for rendering and float-only code paths.
pub fn to_f64(r: &Rational) -> f64 {
    // Scale to keep 64 significant bits regardless of magnitude.
    let shift = r.denom().bits() as i64 - r.numer().magnitude().bits() as i64 + 64;
    let scaled = if shift >= 0 {
        (r.numer() << shift as usize) / r.denom()
    } else {
        r.numer() / (r.denom() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(shift as i32))
}

/// Parses the exact forms accepted throughout the crate: `"a/b"`, `"a"`,
/// and the dyadic form `"m/2^k"`. Decimal points are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let t = s.trim();
    if t.contains('.') || t.contains('e') || t.contains('E') {
        return Err(ExactError::DecimalRejected(t.to_string()));
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| ExactError::Parse(t.to_string()))?;
        let den = den.trim();
        let den: BigInt = if let Some(exp) = den.strip_prefix("2^") {
            let k: u32 = exp.parse().map_err(|_| ExactError::Parse(t.to_string()))?;
            BigInt::one() << k as usize
        } else {
            den.parse().map_err(|_| ExactError::Parse(t.to_string()))?
        };
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rational::new(num, den))
    } else {
        let n: BigInt = t.parse().map_err(|_| ExactError::Parse(t.to_string()))?;
        Ok(Rational::from_integer(n))
    }
}

/// A dyadic rational `mantissa / 2^exponent` in canonical form: the mantissa
/// is odd whenever the exponent is positive, and zero is `0 / 2^0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: u32) -> Self {
        if mantissa.is_zero() {
            return Self { mantissa, exponent: 0 };
        }
        let tz = mantissa.magnitude().trailing_zeros().unwrap_or(0);
        let drop = tz.min(exponent as u64) as u32;
        Self { mantissa: mantissa >> drop as usize, exponent: exponent - drop }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.mantissa.clone(), BigInt::one() << self.exponent as usize)
    }
}

impl TryFrom<&Rational> for Dyadic {
    type Error = ExactError;

    fn try_from(r: &Rational) -> Result<Self, Self::Error> {
        if !is_dyadic(r) {
            return Err(ExactError::NotDyadic(r.to_string()));
        }
        let k = r.denom().magnitude().trailing_zeros().unwrap_or(0) as u32;
        Ok(Dyadic::new(r.numer().clone(), k))
    }
}

impl From<&Dyadic> for Rational {
    fn from(d: &Dyadic) -> Self {
        d.to_rational()
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}/2^{}", self.mantissa, self.exponent)
        }
    }
}

impl FromStr for Dyadic {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dyadic::try_from(&parse_rational(s)?)
    }
}

/// Integer square root of a non-negative big integer.
pub(crate) fn isqrt(n: &BigUint) -> BigUint {
    num_integer::Roots::sqrt(n)
}
