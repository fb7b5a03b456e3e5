use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{format_scaled, isqrt, parse_rational, squarefree_decompose, ExactError, Rational};

/// Exact element `q0 + q1 * sqrt(radicand)` of a real quadratic extension.
///
/// Canonical form: the radicand is squarefree, and the element is rational
/// exactly when `q1 == 0` (a perfect-square radicand is folded into `q0`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadExtElement {
    q0: Rational,
    q1: Rational,
    radicand: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtClass {
    RationalValue(Rational),
    Irrational,
}

impl ExtClass {
    pub fn rational(&self) -> Option<&Rational> {
        match self {
            ExtClass::RationalValue(r) => Some(r),
            ExtClass::Irrational => None,
        }
    }
}

impl QuadExtElement {
    pub fn new(q0: Rational, q1: Rational, radicand: BigUint) -> Self {
        let (root, core) = squarefree_decompose(&radicand);
        let q1 = q1 * Rational::from_integer(BigInt::from(root));
        if core.is_one() || q1.is_zero() {
            Self { q0: q0 + q1, q1: Rational::zero(), radicand: core }
        } else {
            Self { q0, q1, radicand: core }
        }
    }

    pub fn rational(q: Rational) -> Self {
        Self { q0: q, q1: Rational::zero(), radicand: BigUint::one() }
    }

    /// `coef * sqrt(r)` for a non-negative rational `r`, using
    /// `sqrt(a/b) = sqrt(a*b) / b`.
    pub fn scaled_sqrt(coef: Rational, r: &Rational) -> Self {
        assert!(!r.is_negative(), "square root of a negative rational");
        let rad = (r.numer() * r.denom()).to_biguint().expect("non-negative");
        let coef = coef / Rational::from_integer(r.denom().clone());
        Self::new(Rational::zero(), coef, rad)
    }

    pub fn q0(&self) -> &Rational {
        &self.q0
    }

    pub fn q1(&self) -> &Rational {
        &self.q1
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.q1.is_zero()
    }

    pub fn classify(&self) -> ExtClass {
        if self.q1.is_zero() {
            ExtClass::RationalValue(self.q0.clone())
        } else {
            ExtClass::Irrational
        }
    }

    fn compatible(&self, other: &Self) -> bool {
        self.is_rational() || other.is_rational() || self.radicand == other.radicand
    }

    fn shared_radicand(&self, other: &Self) -> BigUint {
        if self.is_rational() { other.radicand.clone() } else { self.radicand.clone() }
    }

    /// Sum, if both operands live in the same extension.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if !self.compatible(other) {
            return None;
        }
        Some(Self::new(&self.q0 + &other.q0, &self.q1 + &other.q1, self.shared_radicand(other)))
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&-other.clone())
    }

    /// Product. Defined within one extension, and additionally for two pure
    /// surds with different radicands (`sqrt(a) * sqrt(b) = sqrt(a*b)`).
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        if self.compatible(other) {
            let r = Rational::from_integer(BigInt::from(self.shared_radicand(other)));
            let q0 = &self.q0 * &other.q0 + &self.q1 * &other.q1 * r;
            let q1 = &self.q0 * &other.q1 + &self.q1 * &other.q0;
            return Some(Self::new(q0, q1, self.shared_radicand(other)));
        }
        if self.q0.is_zero() && other.q0.is_zero() {
            // both radicands squarefree: a*b = g^2 * (a/g) * (b/g), the latter squarefree
            let g = self.radicand.gcd(&other.radicand);
            let rest = (&self.radicand / &g) * (&other.radicand / &g);
            let coef = &self.q1 * &other.q1 * Rational::from_integer(BigInt::from(g));
            return Some(Self::new(Rational::zero(), coef, rest));
        }
        None
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.q0 * k, &self.q1 * k, self.radicand.clone())
    }

    /// Decimal rendering with `digits` places, rounded half away from zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let guard = 6;
        let scale = BigInt::from(10u32).pow((digits + guard) as u32);
        let root = isqrt(&(&self.radicand * scale.magnitude() * scale.magnitude()));
        let surd = Rational::from_integer(BigInt::from(root));
        let v = &self.q0 * Rational::from_integer(scale.clone()) + &self.q1 * surd;
        let trunc: BigInt = v.to_integer();
        let shift = BigInt::from(10u32).pow(guard as u32);
        let half: BigInt = &shift / 2;
        let neg = trunc.is_negative();
        let scaled = (trunc.abs() + half).div_floor(&shift);
        format_scaled(neg && !scaled.is_zero(), &scaled, digits)
    }
}

impl std::ops::Neg for QuadExtElement {
    type Output = QuadExtElement;

    fn neg(self) -> Self::Output {
        Self { q0: -self.q0, q1: -self.q1, radicand: self.radicand }
    }
}

impl From<Rational> for QuadExtElement {
    fn from(q: Rational) -> Self {
        Self::rational(q)
    }
}

impl fmt::Display for QuadExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q1.is_zero() {
            write!(f, "{}", self.q0)
        } else if self.q0.is_zero() {
            write!(f, "{}*sqrt({})", self.q1, self.radicand)
        } else if self.q1.is_negative() {
            write!(f, "{}-{}*sqrt({})", self.q0, -&self.q1, self.radicand)
        } else {
            write!(f, "{}+{}*sqrt({})", self.q0, self.q1, self.radicand)
        }
    }
}

impl FromStr for QuadExtElement {
    type Err = ExactError;

    /// Accepts `"q0"`, `"q1*sqrt(r)"` and `"q0+q1*sqrt(r)"` (also `-` joined).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix(')') else {
            return Ok(Self::rational(parse_rational(&t)?));
        };
        let (head, rad) = body.split_once("*sqrt(").ok_or_else(|| ExactError::Parse(s.to_string()))?;
        let rad: BigUint = rad.parse().map_err(|_| ExactError::Parse(s.to_string()))?;
        // split head into q0 and signed q1 at the last +/- that is not a leading sign
        let split = head
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (q0, q1) = match split {
            Some(i) => {
                let q0 = parse_rational(&head[..i])?;
                let q1 = head[i..].trim_start_matches('+');
                (q0, parse_rational(q1)?)
            }
            None => (Rational::zero(), parse_rational(head)?),
        };
        Ok(Self::new(q0, q1, rad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, ratio};

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn classify_examples() {
        let e = QuadExtElement::new(ratio(1, 2), int(0), big(21));
        assert_eq!(e.classify(), ExtClass::RationalValue(ratio(1, 2)));
        let e = QuadExtElement::new(ratio(3, 8), ratio(1, 16), big(21));
        assert_eq!(e.classify(), ExtClass::Irrational);
        let e = QuadExtElement::new(int(0), ratio(1, 2), big(4));
        assert_eq!(e.classify(), ExtClass::RationalValue(int(1)));
    }

    #[test]
    fn canonical_extracts_squares() {
        let e = QuadExtElement::new(int(0), int(1), big(12));
        assert_eq!(e.q1(), &int(2));
        assert_eq!(e.radicand(), &big(3));
        let s = QuadExtElement::scaled_sqrt(ratio(1, 2), &(ratio(7, 16) * ratio(3, 4)));
        assert_eq!(s, QuadExtElement::new(int(0), ratio(1, 16), big(21)));
    }

    #[test]
    fn surd_products() {
        let a = QuadExtElement::new(int(0), int(1), big(6));
        let b = QuadExtElement::new(int(0), int(1), big(15));
        // sqrt(6) sqrt(15) = sqrt(90) = 3 sqrt(10)
        assert_eq!(a.checked_mul(&b).unwrap(), QuadExtElement::new(int(0), int(3), big(10)));
        let c = QuadExtElement::new(int(1), int(1), big(2));
        let d = QuadExtElement::new(int(1), int(1), big(3));
        assert!(c.checked_mul(&d).is_none());
        assert!(c.checked_add(&d).is_none());
        // (1 + sqrt 2)(1 - sqrt 2) = -1
        let e = QuadExtElement::new(int(1), int(-1), big(2));
        assert_eq!(c.checked_mul(&e).unwrap().classify(), ExtClass::RationalValue(int(-1)));
    }

    #[test]
    fn display_parse_round_trip() {
        for e in [
            QuadExtElement::new(ratio(3, 8), ratio(1, 16), big(21)),
            QuadExtElement::new(ratio(3, 8), ratio(-1, 16), big(21)),
            QuadExtElement::new(ratio(-3, 8), ratio(-1, 16), big(21)),
            QuadExtElement::new(int(0), ratio(1, 2), big(3)),
            QuadExtElement::rational(ratio(-5, 7)),
        ] {
            let s = e.to_string();
            assert_eq!(s.parse::<QuadExtElement>().unwrap(), e, "{s}");
        }
    }

    #[test]
    fn decimal() {
        let e = QuadExtElement::new(ratio(3, 8), ratio(1, 16), big(21));
        // 3/8 + sqrt(21)/16 = 0.66141098...
        assert_eq!(e.to_decimal(6), "0.661411");
        let e = QuadExtElement::new(int(0), int(-1), big(2));
        assert_eq!(e.to_decimal(4), "-1.4142");
    }
}
