//! p-adic valuations, norms and the ultrametric, truncated p-adic integers,
//! and their homeomorphic image in the Cantor set `C(p)`.
//!
//! A p-adic integer `sum a_k p^k` maps to `sum 2 a_k / (2p-1)^(k+1)`, so the
//! low-order p-adic digit selects the coarsest Cantor segment. Everything is
//! truncated at an explicit depth `K`; distances between [`PAdicInt`] values
//! are therefore depth-dependent.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::exactnum::Rational;

pub const DEFAULT_DEPTH: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("digit {digit} out of range for p = {p}")]
    DigitOutOfRange { digit: u32, p: u32 },
    #[error("operands have different primes ({0} and {1})")]
    PrimeMismatch(u32, u32),
    #[error("{0} has a denominator divisible by p; it is not a p-adic integer")]
    NotIntegral(String),
    #[error("{0} lies on the depth-{1} Cantor set; the off-set comparison is vacuous")]
    OnSet(String, usize),
}

/// A validated prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub const TWO: Prime = Prime(2);

    pub fn new(p: u32) -> Result<Self, PadicError> {
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(PadicError::NotPrime(p as u64));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `ord_p x`; zero has infinite valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

fn ord_int(n: &BigInt, p: u32) -> i64 {
    let mut m = n.magnitude().clone();
    let pb = BigUint::from(p);
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub fn ord_p(x: &Rational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(ord_int(x.numer(), p.0) - ord_int(x.denom(), p.0))
}

/// `|x|_p = p^(-ord_p x)`, and `|0|_p = 0`.
pub fn padic_norm(x: &Rational, p: Prime) -> Rational {
    match ord_p(x, p) {
        Valuation::Infinite => Rational::zero(),
        Valuation::Finite(v) => {
            let pk = Rational::from_integer(BigInt::from(p.0).pow(v.unsigned_abs() as u32));
            if v >= 0 { pk.recip() } else { pk }
        }
    }
}

pub fn padic_dist(a: &Rational, b: &Rational, p: Prime) -> Rational {
    padic_norm(&(a - b), p)
}

/// A p-adic integer truncated to `digits.len()` base-p digits, least
/// significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdicInt {
    p: Prime,
    digits: Vec<u32>,
}

impl PAdicInt {
    pub fn new(p: Prime, digits: Vec<u32>) -> Result<Self, PadicError> {
        if let Some(&d) = digits.iter().find(|&&d| d >= p.0) {
            return Err(PadicError::DigitOutOfRange { digit: d, p: p.0 });
        }
        Ok(Self { p, digits })
    }

    /// Residue of `n` modulo `p^depth`, so negative integers get their
    /// p-adic (complement) expansion.
    pub fn from_integer(n: &BigInt, p: Prime, depth: usize) -> Self {
        let modulus = BigInt::from(p.0).pow(depth as u32);
        Self::from_residue(n.mod_floor(&modulus), p, depth)
    }

    /// Expansion of a rational whose denominator is prime to `p`.
    pub fn from_rational(x: &Rational, p: Prime, depth: usize) -> Result<Self, PadicError> {
        if (x.denom() % BigInt::from(p.0)).is_zero() {
            return Err(PadicError::NotIntegral(x.to_string()));
        }
        let modulus = BigInt::from(p.0).pow(depth as u32);
        let inv = x.denom().extended_gcd(&modulus).x;
        Ok(Self::from_residue((x.numer() * inv).mod_floor(&modulus), p, depth))
    }

    fn from_residue(mut r: BigInt, p: Prime, depth: usize) -> Self {
        let pb = BigInt::from(p.0);
        let digits = (0..depth)
            .map(|_| {
                let (q, d) = r.div_mod_floor(&pb);
                r = q;
                d.to_u32().expect("digit < p")
            })
            .collect();
        Self { p, digits }
    }

    /// Haar-typical sample: independent uniform digits.
    pub fn random<R: Rng + ?Sized>(p: Prime, depth: usize, rng: &mut R) -> Self {
        let digits = (0..depth).map(|_| rng.gen_range(0..p.0)).collect();
        Self { p, digits }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// The integer `sum digit_k p^k` this truncation denotes.
    pub fn value(&self) -> BigInt {
        let pb = BigInt::from(self.p.0);
        self.digits.iter().rev().fold(BigInt::zero(), |acc, &d| acc * &pb + d)
    }

    /// `d_p` between truncated values.
    pub fn dist(&self, other: &Self) -> Result<Rational, PadicError> {
        if self.p != other.p {
            return Err(PadicError::PrimeMismatch(self.p.0, other.p.0));
        }
        let diff = Rational::from_integer(self.value() - other.value());
        Ok(padic_norm(&diff, self.p))
    }
}

/// A point of `C(p)` obtained from a finite digit expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CantorPoint {
    pub value: Rational,
    pub p: Prime,
    pub depth: usize,
}

pub fn cantor_embed(z: &PAdicInt) -> CantorPoint {
    let base = BigInt::from(2 * z.p.0 - 1);
    // Horner from the finest digit outward: v = (2 a_0 + v') / (2p-1)
    let value = z.digits.iter().rev().fold(Rational::zero(), |acc, &d| {
        (acc + Rational::from_integer(BigInt::from(2 * d))) / Rational::from_integer(base.clone())
    });
    CantorPoint { value, p: z.p, depth: z.depth() }
}

/// The depth-`depth` digit sequence embedding to `value`, if any. Decided
/// exactly through the base-(2p-1) expansion, whose digits must all be even.
pub fn cantor_preimage(value: &Rational, p: Prime, depth: usize) -> Option<PAdicInt> {
    if value.is_negative() {
        return None;
    }
    let base = BigInt::from(2 * p.0 - 1);
    let scaled = value * Rational::from_integer(base.pow(depth as u32));
    if !scaled.is_integer() {
        return None;
    }
    let mut m = scaled.to_integer();
    let mut digits = vec![0u32; depth];
    for k in (0..depth).rev() {
        let (q, r) = m.div_rem(&base);
        let r = r.to_u32().expect("digit");
        if r % 2 == 1 {
            return None;
        }
        digits[k] = r / 2;
        m = q;
    }
    if !m.is_zero() {
        return None;
    }
    Some(PAdicInt { p, digits })
}

pub fn on_cantor_set(value: &Rational, p: Prime, depth: usize) -> bool {
    cantor_preimage(value, p, depth).is_some()
}

/// Euclidean vs p-adic closeness for two on-set points and one off-set point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fig1Report {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub euclid_ab: Rational,
    pub euclid_ac: Rational,
    pub padic_ab: Rational,
    /// `c` has no p-adic integer preimage, so its p-adic distance to `a` is
    /// at least `p`.
    pub padic_ac_lower_bound: u32,
    pub c_on_set: bool,
    /// `|a - c| < |a - b|` in the Euclidean sense.
    pub euclid_c_closer: bool,
    /// `b` is p-adically closer to `a` than `c` can be.
    pub padic_b_closer: bool,
}

pub fn fig1_distance_demo(a: &PAdicInt, b: &PAdicInt, c_value: &Rational) -> Result<Fig1Report, PadicError> {
    if a.p != b.p {
        return Err(PadicError::PrimeMismatch(a.p.0, b.p.0));
    }
    if on_cantor_set(c_value, a.p, a.depth()) {
        return Err(PadicError::OnSet(c_value.to_string(), a.depth()));
    }
    let fa = cantor_embed(a).value;
    let fb = cantor_embed(b).value;
    let euclid_ab = (&fa - &fb).abs();
    let euclid_ac = (&fa - c_value).abs();
    let padic_ab = a.dist(b)?;
    let bound = Rational::from_integer(BigInt::from(a.p.0));
    Ok(Fig1Report {
        euclid_c_closer: euclid_ac < euclid_ab,
        padic_b_closer: padic_ab < bound,
        a: fa,
        b: fb,
        c: c_value.clone(),
        euclid_ab,
        euclid_ac,
        padic_ab,
        padic_ac_lower_bound: a.p.0,
        c_on_set: false,
    })
}

/// `p^(-k)` as a rational.
pub fn inverse_power(p: Prime, k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(p.0).pow(k as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, ratio};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(9).is_err());
        assert_eq!(Prime::new(7).unwrap().get(), 7);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(ord_p(&int(12), p(2)), Valuation::Finite(2));
        assert_eq!(ord_p(&ratio(3, 8), p(2)), Valuation::Finite(-3));
        assert_eq!(ord_p(&int(0), p(5)), Valuation::Infinite);
        assert_eq!(ord_p(&ratio(-50, 3), p(5)), Valuation::Finite(2));
    }

    #[test]
    fn norm_and_distance_examples() {
        assert_eq!(padic_norm(&int(12), p(2)), ratio(1, 4));
        assert_eq!(padic_norm(&int(4), p(2)), ratio(1, 4));
        assert_eq!(padic_norm(&int(8), p(2)), ratio(1, 8));
        assert_eq!(padic_norm(&ratio(3, 8), p(2)), int(8));
        assert_eq!(padic_dist(&int(7), &int(7), p(2)), int(0));
        assert_eq!(padic_dist(&int(1 + 2 + 4), &int(1 + 2), p(2)), ratio(1, 4));
        assert_eq!(padic_dist(&ratio(1, 3), &int(0), p(2)), int(1));
    }

    #[test]
    fn embed_examples() {
        let z = PAdicInt::new(p(2), vec![1, 1]).unwrap();
        assert_eq!(cantor_embed(&z).value, ratio(8, 9));
        let z = PAdicInt::new(p(2), vec![0; 6]).unwrap();
        assert_eq!(cantor_embed(&z).value, int(0));
        let z = PAdicInt::new(p(3), vec![2]).unwrap();
        assert_eq!(cantor_embed(&z).value, ratio(4, 5));
        assert!(PAdicInt::new(p(3), vec![3]).is_err());
    }

    #[test]
    fn expansions() {
        let z = PAdicInt::from_integer(&BigInt::from(-1), p(2), 5);
        assert_eq!(z.digits(), &[1, 1, 1, 1, 1]);
        // 1/3 = ...0101011 in Z_2
        let z = PAdicInt::from_rational(&ratio(1, 3), p(2), 6).unwrap();
        assert_eq!(z.digits(), &[1, 1, 0, 1, 0, 1]);
        assert!(PAdicInt::from_rational(&ratio(1, 2), p(2), 4).is_err());
        let z = PAdicInt::from_integer(&BigInt::from(11), p(3), 4);
        assert_eq!(z.value(), BigInt::from(11));
    }

    #[test]
    fn preimage_decides_membership() {
        assert!(on_cantor_set(&ratio(8, 9), p(2), 2));
        assert!(!on_cantor_set(&ratio(1, 2), p(2), 5));
        assert!(!on_cantor_set(&int(1), p(2), 3));
        let z = PAdicInt::new(p(3), vec![2, 0, 1, 2]).unwrap();
        assert_eq!(cantor_preimage(&cantor_embed(&z).value, p(3), 4), Some(z));
    }

    #[test]
    fn fig1_adjacent_points() {
        let a = PAdicInt::new(p(2), vec![0, 0, 0, 0, 0]).unwrap();
        let b = PAdicInt::new(p(2), vec![0, 0, 0, 0, 1]).unwrap();
        let fa = cantor_embed(&a).value;
        let fb = cantor_embed(&b).value;
        let c = (&fa + &fb) / int(2);
        let r = fig1_distance_demo(&a, &b, &c).unwrap();
        assert!(r.euclid_c_closer);
        assert!(r.padic_ab <= ratio(1, 2));
        assert!(r.padic_b_closer);
        assert!(!r.c_on_set);

        let same = fig1_distance_demo(&a, &a, &c).unwrap();
        assert_eq!(same.euclid_ab, int(0));
        assert_eq!(same.padic_ab, int(0));

        let on_set = cantor_embed(&b).value;
        assert!(matches!(fig1_distance_demo(&a, &b, &on_set), Err(PadicError::OnSet(..))));
    }

    #[test]
    fn fig1_random_depth8() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let a = PAdicInt::random(p(2), 8, &mut rng);
            let b = PAdicInt::random(p(2), 8, &mut rng);
            // off-set point: odd numerator over 3^8
            let c = Rational::new(BigInt::from(2 * rng.gen_range(0..3280) + 1), BigInt::from(6561));
            let r = fig1_distance_demo(&a, &b, &c).unwrap();
            assert!(r.padic_ab <= int(1));
            assert!(r.padic_b_closer);
        }
    }

    #[test]
    fn haar_digit_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for prime in [2u32, 3, 5] {
            let pr = p(prime);
            let mut counts = vec![0u64; prime as usize];
            let samples = 2000;
            let depth = 32;
            for _ in 0..samples {
                for &d in PAdicInt::random(pr, depth, &mut rng).digits() {
                    counts[d as usize] += 1;
                }
            }
            let n = (samples * depth) as f64;
            let q = 1.0 / prime as f64;
            let sigma = (n * q * (1.0 - q)).sqrt();
            for c in counts {
                assert!((c as f64 - n * q).abs() <= 3.0 * sigma, "p={prime}: {c}");
            }
        }
    }

    fn rational() -> impl Strategy<Value = Rational> {
        (-5000i64..5000, 1i64..5000).prop_map(|(n, d)| ratio(n, d))
    }

    fn prime() -> impl Strategy<Value = Prime> {
        prop_oneof![Just(p(2)), Just(p(3)), Just(p(5))]
    }

    proptest! {
        #[test]
        fn ultrametric(a in rational(), b in rational(), c in rational(), pr in prime()) {
            let ac = padic_dist(&a, &c, pr);
            let ab = padic_dist(&a, &b, pr);
            let bc = padic_dist(&b, &c, pr);
            prop_assert!(ac <= ab.max(bc));
        }

        #[test]
        fn multiplicative(x in rational(), y in rational(), pr in prime()) {
            prop_assert_eq!(padic_norm(&(&x * &y), pr), padic_norm(&x, pr) * padic_norm(&y, pr));
        }

        #[test]
        fn embedding_monotone(da in proptest::collection::vec(0u32..3, 6), db in proptest::collection::vec(0u32..3, 6)) {
            let a = PAdicInt::new(p(3), da.clone()).unwrap();
            let b = PAdicInt::new(p(3), db.clone()).unwrap();
            // digit 0 is the coarsest Cantor segment, so compare digit 0 first
            prop_assert_eq!(da.cmp(&db), cantor_embed(&a).value.cmp(&cantor_embed(&b).value));
        }

        #[test]
        fn shared_prefix_shrinks_both_distances(
            prefix in proptest::collection::vec(0u32..5, 0..8),
            ta in proptest::collection::vec(0u32..5, 8),
            tb in proptest::collection::vec(0u32..5, 8),
        ) {
            let pr = p(5);
            let k = prefix.len();
            let a = PAdicInt::new(pr, [prefix.clone(), ta].concat()).unwrap();
            let b = PAdicInt::new(pr, [prefix, tb].concat()).unwrap();
            prop_assert!(a.dist(&b).unwrap() <= inverse_power(pr, k));
            let gap = (cantor_embed(&a).value - cantor_embed(&b).value).abs();
            prop_assert!(gap <= Rational::new(BigInt::one(), BigInt::from(9).pow(k as u32)));
        }
    }
}
