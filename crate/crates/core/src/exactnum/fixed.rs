//! Binary fixed-point numbers of arbitrary precision.
//!
//! Used for decimal reports and as the numeric side of cross-checks; never
//! on a path that decides describability.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// The value `mant / 2^bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixed {
    mant: BigInt,
    bits: u32,
}

const GUARD: u32 = 32;

impl Fixed {
    /// Enough for 60 correct decimal digits with room to spare.
    pub const DEFAULT_BITS: u32 = 256;

    pub fn zero(bits: u32) -> Self {
        Self { mant: BigInt::zero(), bits }
    }

    pub fn from_int(n: i64, bits: u32) -> Self {
        Self { mant: BigInt::from(n) << bits as usize, bits }
    }

    pub fn from_rational(r: &Rational, bits: u32) -> Self {
        let num = (r.numer() << (bits as usize + 1)) + r.denom();
        Self { mant: num.div_floor(&(r.denom() * 2)), bits }
    }

    pub fn from_f64(x: f64, bits: u32) -> Self {
        let r = Rational::from_float(x).expect("finite float");
        Self::from_rational(&r, bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The exact rational this fixed-point value denotes.
    pub fn to_rational(&self) -> Rational {
        Rational::new(self.mant.clone(), BigInt::one() << self.bits as usize)
    }

    pub fn to_f64(&self) -> f64 {
        super::to_f64(&self.to_rational())
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        super::to_decimal(&self.to_rational(), digits)
    }

    fn with_bits(&self, bits: u32) -> Self {
        let mant = match bits.cmp(&self.bits) {
            Ordering::Equal => self.mant.clone(),
            Ordering::Greater => &self.mant << (bits - self.bits) as usize,
            Ordering::Less => &self.mant >> (self.bits - bits) as usize,
        };
        Self { mant, bits }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.bits, o.bits);
        Self { mant: &self.mant + &o.mant, bits: self.bits }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.bits, o.bits);
        Self { mant: &self.mant - &o.mant, bits: self.bits }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.bits, o.bits);
        Self { mant: (&self.mant * &o.mant) >> self.bits as usize, bits: self.bits }
    }

    pub fn div(&self, o: &Self) -> Self {
        assert_eq!(self.bits, o.bits);
        Self { mant: (&self.mant << self.bits as usize).div_floor(&o.mant), bits: self.bits }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Self { mant: &self.mant * k, bits: self.bits }
    }

    pub fn div_int(&self, k: i64) -> Self {
        Self { mant: self.mant.div_floor(&BigInt::from(k)), bits: self.bits }
    }

    pub fn neg(&self) -> Self {
        Self { mant: -&self.mant, bits: self.bits }
    }

    pub fn abs(&self) -> Self {
        Self { mant: self.mant.abs(), bits: self.bits }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.mant.is_negative(), "sqrt of negative");
        let m = self.mant.magnitude() << self.bits as usize;
        Self { mant: BigInt::from(super::isqrt(&m)), bits: self.bits }
    }

    /// pi via Machin's formula, cached per precision.
    pub fn pi(bits: u32) -> Self {
        static CACHE: OnceLock<Mutex<HashMap<u32, Fixed>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(p) = cache.lock().expect("pi cache").get(&bits) {
            return p.clone();
        }
        let wb = bits + GUARD;
        let pi = atan_inv(5, wb).mul_int(16).sub(&atan_inv(239, wb).mul_int(4)).with_bits(bits);
        cache.lock().expect("pi cache").insert(bits, pi.clone());
        pi
    }

    pub fn cos(&self) -> Self {
        let wb = self.bits + GUARD;
        let x = reduce_angle(&self.with_bits(wb));
        // sum (-1)^k x^(2k) / (2k)!
        let x2 = x.mul(&x);
        let mut term = Fixed::from_int(1, wb);
        let mut sum = term.clone();
        let mut k = 1i64;
        while !term.mant.is_zero() {
            term = term.mul(&x2).div_int((2 * k - 1) * (2 * k)).neg();
            sum = sum.add(&term);
            k += 1;
        }
        sum.with_bits(self.bits)
    }

    pub fn sin(&self) -> Self {
        let wb = self.bits + GUARD;
        let x = reduce_angle(&self.with_bits(wb));
        let x2 = x.mul(&x);
        let mut term = x.clone();
        let mut sum = term.clone();
        let mut k = 1i64;
        while !term.mant.is_zero() {
            term = term.mul(&x2).div_int((2 * k) * (2 * k + 1)).neg();
            sum = sum.add(&term);
            k += 1;
        }
        sum.with_bits(self.bits)
    }
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fixed {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.bits, other.bits);
        self.mant.cmp(&other.mant)
    }
}

/// Maps `x` into `[-pi, pi]`.
fn reduce_angle(x: &Fixed) -> Fixed {
    let two_pi = Fixed::pi(x.bits).mul_int(2);
    let turns = x.add(&Fixed::pi(x.bits)).div(&two_pi).mant >> x.bits as usize;
    let turns = turns.to_i64().expect("angle magnitude fits in i64 turns");
    x.sub(&two_pi.mul_int(turns))
}

/// atan(1/n) by its Taylor series.
fn atan_inv(n: i64, bits: u32) -> Fixed {
    let n2 = n * n;
    let mut power = Fixed::from_int(1, bits).div_int(n);
    let mut sum = power.clone();
    let mut k = 1i64;
    while !power.mant.is_zero() {
        power = power.div_int(n2).neg();
        sum = sum.add(&power.div_int(2 * k + 1));
        k += 1;
    }
    sum
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// taken from the continued-fraction convergents of `x`.
pub fn rational_reconstruction(x: &Rational, max_den: &BigInt) -> Rational {
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    let mut best = Rational::from_integer(x.floor().to_integer());
    loop {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if &k2 > max_den {
            break;
        }
        best = Rational::new(h2.clone(), k2.clone());
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, ratio};

    const PI_60: &str = "3.141592653589793238462643383279502884197169399375105820974945";

    #[test]
    fn pi_digits() {
        assert_eq!(Fixed::pi(256).to_decimal(60), PI_60);
    }

    #[test]
    fn trig_values() {
        let bits = 256;
        let pi = Fixed::pi(bits);
        let third = pi.div_int(3);
        assert_eq!(third.cos().to_decimal(60), format!("0.{}", "5".to_string() + &"0".repeat(59)));
        let quarter = pi.div_int(4);
        let half_sqrt2 = Fixed::from_int(2, bits).sqrt().div_int(2);
        assert_eq!(quarter.cos().to_decimal(60), half_sqrt2.to_decimal(60));
        assert_eq!(pi.cos().to_decimal(50), format!("-1.{}", "0".repeat(50)));
        let big = pi.mul_int(1001).add(&Fixed::from_rational(&ratio(1, 3), bits));
        // cos(1001 pi + 1/3) = -cos(1/3)
        let lhs = big.cos();
        let rhs = Fixed::from_rational(&ratio(1, 3), bits).cos().neg();
        assert_eq!(lhs.to_decimal(60), rhs.to_decimal(60));
        let s = Fixed::from_int(0, bits).sin();
        assert_eq!(s.to_decimal(10), "0.0000000000");
        assert_eq!(pi.div_int(6).sin().to_decimal(40), format!("0.5{}", "0".repeat(39)));
    }

    #[test]
    fn reconstruction() {
        let x = Fixed::from_rational(&ratio(355, 113), 256).to_rational();
        assert_eq!(rational_reconstruction(&x, &BigInt::from(1000)), ratio(355, 113));
        let pi = Fixed::pi(256).to_rational();
        assert_eq!(rational_reconstruction(&pi, &BigInt::from(100)), ratio(22, 7));
        assert_eq!(rational_reconstruction(&int(-3), &BigInt::from(10)), int(-3));
        assert_eq!(rational_reconstruction(&ratio(-1, 2), &BigInt::from(10)), ratio(-1, 2));
    }
}
