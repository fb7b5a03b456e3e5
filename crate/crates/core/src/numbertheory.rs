//! Rational cosines of rational angles and the describability classes of a
//! phase angle.
//!
//! For `phi = m pi / n` the cosine is rational only when it is one of
//! `0, +-1/2, +-1`. Consequently `phi/pi` and `cos phi` are never both dyadic
//! except at `phi in {0, pi/2, pi, 3pi/2}`. The closed classification is what
//! decides; the doubling map `x -> x^2 - 2` is exposed as an independent
//! cross-check.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactnum::{int, is_dyadic, parse_rational, ratio, ExactError, ExtClass, QuadExtElement, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleError {
    #[error("cosine {0} lies outside [-1, 1]")]
    CosOutOfRange(String),
    #[error("cannot parse angle `{0}`; expected `m/n pi` or `cos=p/q`")]
    Parse(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("angle {0} is not a dyadic multiple of pi")]
    NotDyadicAngle(String),
    #[error("exponent k = {0} out of range (1..=62)")]
    ExponentRange(u32),
}

/// The angle `m pi / n`, reduced and normalised to `0 <= m/n < 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PiRational {
    m: i64,
    n: i64,
}

impl PiRational {
    pub fn new(m: i64, n: i64) -> Self {
        assert!(n != 0, "zero denominator");
        let (m, n) = if n < 0 { (-m, -n) } else { (m, n) };
        let g = m.gcd(&n);
        let (m, n) = (m / g, n / g);
        Self { m: m.rem_euclid(2 * n), n }
    }

    pub fn from_ratio(r: &Rational) -> Self {
        let m: i64 = r.numer().try_into().expect("numerator fits i64");
        let n: i64 = r.denom().try_into().expect("denominator fits i64");
        Self::new(m, n)
    }

    pub fn zero() -> Self {
        Self { m: 0, n: 1 }
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// `phi / pi` as an exact rational in `[0, 2)`.
    pub fn over_pi(&self) -> Rational {
        ratio(self.m, self.n)
    }

    pub fn is_dyadic(&self) -> bool {
        self.n.count_ones() == 1
    }

    /// `phi in {0, pi/2, pi, 3pi/2}`.
    pub fn is_exceptional(&self) -> bool {
        self.n <= 2
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_ratio(&(self.over_pi() + o.over_pi()))
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_ratio(&(self.over_pi() * int(k)))
    }

    pub fn to_f64(&self) -> f64 {
        self.m as f64 / self.n as f64 * std::f64::consts::PI
    }
}

impl fmt::Display for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} pi", self.m, self.n)
    }
}

impl FromStr for PiRational {
    type Err = AngleError;

    /// `"3/8 pi"`, `"3/8pi"`, `"pi"`, `"-pi/4"`, `"2pi"` and plain `"0"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "0" {
            return Ok(Self::zero());
        }
        let coef = if let Some(head) = t.strip_suffix("pi") {
            match head {
                "" | "+" => int(1),
                "-" => int(-1),
                h => parse_rational(h.trim_end_matches('*'))?,
            }
        } else if let Some((head, den)) = t.split_once("pi/") {
            let sign = match head {
                "" | "+" => 1,
                "-" => -1,
                _ => return Err(AngleError::Parse(s.to_string())),
            };
            let den: i64 = den.parse().map_err(|_| AngleError::Parse(s.to_string()))?;
            if den == 0 {
                return Err(AngleError::Parse(s.to_string()));
            }
            ratio(sign, den)
        } else {
            return Err(AngleError::Parse(s.to_string()));
        };
        Ok(Self::from_ratio(&coef))
    }
}

/// Exact verdict on `cos(m pi / n)`.
pub fn cos_rational_classify(angle: &PiRational) -> ExtClass {
    let (m, n) = (angle.m, angle.n);
    match n {
        1 => ExtClass::RationalValue(if m == 0 { int(1) } else { int(-1) }),
        2 => ExtClass::RationalValue(int(0)),
        3 => ExtClass::RationalValue(if m == 1 || m == 5 { ratio(1, 2) } else { ratio(-1, 2) }),
        _ => ExtClass::Irrational,
    }
}

/// `cos(m pi / n)` as an element of a real quadratic field, when it lies in
/// one (`n` in 1..=6). Returns `None` for higher-degree algebraic values.
pub fn cos_quadratic(angle: &PiRational) -> Option<QuadExtElement> {
    let (m, n) = (angle.m, angle.n);
    // fold to [0, pi]
    let m = if m > n { 2 * n - m } else { m };
    let surd = |q0: Rational, q1: Rational, r: u32| QuadExtElement::new(q0, q1, BigUint::from(r));
    match n {
        1..=3 => cos_rational_classify(angle).rational().cloned().map(QuadExtElement::rational),
        4 => Some(surd(int(0), if m == 1 { ratio(1, 2) } else { ratio(-1, 2) }, 2)),
        6 => Some(surd(int(0), if m == 1 { ratio(1, 2) } else { ratio(-1, 2) }, 3)),
        5 => Some(match m {
            1 => surd(ratio(1, 4), ratio(1, 4), 5),
            2 => surd(ratio(-1, 4), ratio(1, 4), 5),
            3 => surd(ratio(1, 4), ratio(-1, 4), 5),
            _ => surd(ratio(-1, 4), ratio(-1, 4), 5),
        }),
        _ => None,
    }
}

/// `sin phi = cos(pi/2 - phi)`.
pub fn sin_quadratic(angle: &PiRational) -> Option<QuadExtElement> {
    cos_quadratic(&PiRational::from_ratio(&(ratio(1, 2) - angle.over_pi())))
}

/// `x_0, x_1, ..., x_steps` with `x_{k+1} = x_k^2 - 2`: the orbit of
/// `2 cos phi` under angle doubling.
pub fn doubling_sequence(two_cos_phi: &Rational, steps: usize) -> Vec<Rational> {
    let two = int(2);
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = two_cos_phi.clone();
    out.push(x.clone());
    for _ in 0..steps {
        x = &x * &x - &two;
        out.push(x.clone());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AngleSpec {
    Pi(PiRational),
    Cos(Rational),
}

impl FromStr for AngleSpec {
    type Err = AngleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.strip_prefix("cos=") {
            Some(c) => Ok(AngleSpec::Cos(parse_rational(c)?)),
            None => Ok(AngleSpec::Pi(t.parse()?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngleKind {
    /// `phi/pi` dyadic: the angle supports a position-type measurement.
    PositionConsistent,
    /// `cos phi` dyadic: the angle supports a momentum-type measurement.
    MomentumConsistent,
    /// `phi in {0, pi/2, pi, 3pi/2}`: both hold.
    Exceptional,
    Neither,
}

impl fmt::Display for AngleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AngleKind::PositionConsistent => "position_consistent",
            AngleKind::MomentumConsistent => "momentum_consistent",
            AngleKind::Exceptional => "exceptional",
            AngleKind::Neither => "neither",
        };
        f.write_str(s)
    }
}

/// What is known exactly about an angle. A missing field means the quantity
/// is certified irrational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleDescriptor {
    pub kind: AngleKind,
    pub phi_over_pi: Option<Rational>,
    pub cos_phi: Option<Rational>,
}

pub fn classify_angle(spec: &AngleSpec) -> Result<AngleDescriptor, AngleError> {
    match spec {
        AngleSpec::Pi(a) => {
            let cos_phi = cos_rational_classify(a).rational().cloned();
            let kind = if a.is_exceptional() {
                AngleKind::Exceptional
            } else if a.is_dyadic() {
                AngleKind::PositionConsistent
            } else if cos_phi.as_ref().is_some_and(is_dyadic) {
                AngleKind::MomentumConsistent
            } else {
                AngleKind::Neither
            };
            Ok(AngleDescriptor { kind, phi_over_pi: Some(a.over_pi()), cos_phi })
        }
        AngleSpec::Cos(c) => {
            if c.abs() > int(1) {
                return Err(AngleError::CosOutOfRange(c.to_string()));
            }
            // principal angle in [0, pi]; rational phi/pi only at the Niven values
            let phi_over_pi = [(int(1), int(0)), (int(0), ratio(1, 2)), (int(-1), int(1)), (ratio(1, 2), ratio(1, 3)), (ratio(-1, 2), ratio(2, 3))]
                .into_iter()
                .find(|(cv, _)| cv == c)
                .map(|(_, a)| a);
            let kind = if c.is_zero() || c.abs().is_one() {
                AngleKind::Exceptional
            } else if is_dyadic(c) {
                AngleKind::MomentumConsistent
            } else {
                AngleKind::Neither
            };
            Ok(AngleDescriptor { kind, phi_over_pi, cos_phi: Some(c.clone()) })
        }
    }
}

/// Why `e^{i phi}` cannot be added within the dyadic-angle set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSumReport {
    pub phi1: PiRational,
    pub phi2: PiRational,
    /// `(phi1 - phi2)/pi`, taken from the normalised representatives.
    pub diff_over_pi: Rational,
    pub half_diff: PiRational,
    pub cos_half_diff: ExtClass,
    pub exceptional: bool,
    /// True when `cos((phi1 - phi2)/2)` is irrational, so
    /// `(e^{i phi1} + e^{i phi2})/2` leaves the describable set.
    pub additive_obstruction: bool,
}

pub fn phase_sum_incompatibility(phi1: &PiRational, phi2: &PiRational) -> Result<PhaseSumReport, AngleError> {
    for a in [phi1, phi2] {
        if !a.is_dyadic() {
            return Err(AngleError::NotDyadicAngle(a.to_string()));
        }
    }
    let diff = phi1.over_pi() - phi2.over_pi();
    let half_diff = PiRational::from_ratio(&(&diff / int(2)));
    let cos_half_diff = cos_rational_classify(&half_diff);
    Ok(PhaseSumReport {
        phi1: *phi1,
        phi2: *phi2,
        diff_over_pi: diff,
        exceptional: half_diff.is_exceptional(),
        additive_obstruction: cos_half_diff == ExtClass::Irrational,
        cos_half_diff,
        half_diff,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PythagoreanReport {
    pub k: u32,
    pub hypotenuse: u128,
    /// Largest leg `a` examined.
    pub bound: u128,
    pub triples: Vec<(u128, u128)>,
}

/// Searches `0 < a <= b < 2^k` with `a^2 + b^2 = 4^k`, `a` up to
/// `search_bound` (default: all of them).
pub fn pythagorean_hypotenuse_check(k: u32, search_bound: Option<u128>) -> Result<PythagoreanReport, AngleError> {
    if !(1..=62).contains(&k) {
        return Err(AngleError::ExponentRange(k));
    }
    let c = 1u128 << k;
    let c2 = c * c;
    let bound = search_bound.unwrap_or(c - 1).min(c - 1);
    let mut triples = Vec::new();
    for a in 1..=bound {
        let rest = c2 - a * a;
        let b = rest.sqrt();
        if b * b == rest && a <= b && b < c {
            triples.push((a, b));
        }
    }
    Ok(PythagoreanReport { k, hypotenuse: c, bound, triples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Fixed;

    fn pi(m: i64, n: i64) -> PiRational {
        PiRational::new(m, n)
    }

    #[test]
    fn canonical_angles() {
        assert_eq!(pi(-1, 4), pi(7, 4));
        assert_eq!(pi(9, 4), pi(1, 4));
        assert_eq!(pi(4, 2), PiRational::zero());
        assert_eq!(pi(2, -6), pi(5, 3));
        assert_eq!("3/8 pi".parse::<PiRational>().unwrap(), pi(3, 8));
        assert_eq!("1/3pi".parse::<PiRational>().unwrap(), pi(1, 3));
        assert_eq!("pi".parse::<PiRational>().unwrap(), pi(1, 1));
        assert_eq!("-pi/4".parse::<PiRational>().unwrap(), pi(7, 4));
        assert_eq!("2pi".parse::<PiRational>().unwrap(), PiRational::zero());
        assert!("0.375pi".parse::<PiRational>().is_err());
        assert!("3/8".parse::<PiRational>().is_err());
    }

    #[test]
    fn niven_examples() {
        assert_eq!(cos_rational_classify(&pi(1, 3)), ExtClass::RationalValue(ratio(1, 2)));
        assert_eq!(cos_rational_classify(&pi(1, 4)), ExtClass::Irrational);
        assert_eq!(cos_rational_classify(&PiRational::zero()), ExtClass::RationalValue(int(1)));
        assert_eq!(cos_rational_classify(&pi(3, 2)), ExtClass::RationalValue(int(0)));
        assert_eq!(cos_rational_classify(&pi(4, 3)), ExtClass::RationalValue(ratio(-1, 2)));
    }

    #[test]
    fn quadratic_table_matches_numeric() {
        let bits = 200;
        for n in 1..=12 {
            for m in 0..2 * n {
                if m.gcd(&n) != 1 && !(m == 0 && n == 1) {
                    continue;
                }
                let a = pi(m, n);
                let numeric = Fixed::pi(bits).mul_int(a.m).div_int(a.n).cos();
                match cos_quadratic(&a) {
                    Some(e) => assert_eq!(e.to_decimal(40), numeric.to_decimal(40), "cos({a})"),
                    None => assert!(n > 6, "missing cos({a})"),
                }
                if let Some(s) = sin_quadratic(&a) {
                    let numeric = Fixed::pi(bits).mul_int(a.m).div_int(a.n).sin();
                    assert_eq!(s.to_decimal(40), numeric.to_decimal(40), "sin({a})");
                }
            }
        }
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(doubling_sequence(&int(2), 4), vec![int(2); 5]);
        let seq = doubling_sequence(&ratio(6, 5), 3);
        let dens: Vec<num_bigint::BigInt> = seq.iter().map(|r| r.denom().clone()).collect();
        assert_eq!(dens, vec![num_bigint::BigInt::from(5), num_bigint::BigInt::from(25), num_bigint::BigInt::from(625), num_bigint::BigInt::from(390625)]);
        assert_eq!(doubling_sequence(&int(1), 3), vec![int(1), int(-1), int(-1), int(-1)]);
    }

    #[test]
    fn classify_examples() {
        let d = classify_angle(&AngleSpec::Pi(pi(3, 8))).unwrap();
        assert_eq!(d.kind, AngleKind::PositionConsistent);
        assert_eq!(d.cos_phi, None);
        let d = classify_angle(&AngleSpec::Cos(ratio(5, 8))).unwrap();
        assert_eq!(d.kind, AngleKind::MomentumConsistent);
        assert_eq!(d.phi_over_pi, None);
        let d = classify_angle(&AngleSpec::Pi(pi(1, 2))).unwrap();
        assert_eq!(d.kind, AngleKind::Exceptional);
        assert_eq!(d.cos_phi, Some(int(0)));
        let d = classify_angle(&AngleSpec::Pi(pi(1, 3))).unwrap();
        assert_eq!(d.kind, AngleKind::MomentumConsistent);
        assert_eq!(d.phi_over_pi, Some(ratio(1, 3)));
        let d = classify_angle(&AngleSpec::Cos(ratio(1, 3))).unwrap();
        assert_eq!(d.kind, AngleKind::Neither);
        let d = classify_angle(&AngleSpec::Cos(ratio(-1, 2))).unwrap();
        assert_eq!(d.phi_over_pi, Some(ratio(2, 3)));
        assert!(matches!(classify_angle(&AngleSpec::Cos(ratio(9, 8))), Err(AngleError::CosOutOfRange(_))));
        assert_eq!("cos=5/2^3".parse::<AngleSpec>().unwrap(), AngleSpec::Cos(ratio(5, 8)));
    }

    #[test]
    fn never_both_dyadic_off_the_exceptions() {
        for n in 1..=200i64 {
            for m in 0..2 * n {
                if m.gcd(&n) != 1 && !(m == 0 && n == 1) {
                    continue;
                }
                let d = classify_angle(&AngleSpec::Pi(pi(m, n))).unwrap();
                let both = d.phi_over_pi.as_ref().is_some_and(is_dyadic) && d.cos_phi.as_ref().is_some_and(is_dyadic);
                assert_eq!(both, d.kind == AngleKind::Exceptional, "{m}/{n}");
            }
        }
        for k in 0..12u32 {
            for num in -(1i64 << k)..=(1 << k) {
                let d = classify_angle(&AngleSpec::Cos(ratio(num, 1 << k))).unwrap();
                let both = d.phi_over_pi.as_ref().is_some_and(is_dyadic) && d.cos_phi.as_ref().is_some_and(is_dyadic);
                assert_eq!(both, d.kind == AngleKind::Exceptional);
            }
        }
    }

    #[test]
    fn phase_sum_examples() {
        let r = phase_sum_incompatibility(&pi(1, 4), &PiRational::zero()).unwrap();
        assert_eq!(r.half_diff, pi(1, 8));
        assert_eq!(r.cos_half_diff, ExtClass::Irrational);
        assert!(r.additive_obstruction);

        let r = phase_sum_incompatibility(&pi(3, 4), &pi(3, 4)).unwrap();
        assert_eq!(r.cos_half_diff, ExtClass::RationalValue(int(1)));
        assert!(r.exceptional && !r.additive_obstruction);

        let r = phase_sum_incompatibility(&pi(3, 2), &pi(1, 2)).unwrap();
        assert_eq!(r.half_diff, pi(1, 2));
        assert_eq!(r.cos_half_diff, ExtClass::RationalValue(int(0)));
        assert!(r.exceptional);

        assert!(phase_sum_incompatibility(&pi(1, 3), &PiRational::zero()).is_err());
    }

    #[test]
    fn pythagorean_examples() {
        for k in [1, 2, 5] {
            let r = pythagorean_hypotenuse_check(k, None).unwrap();
            assert!(r.triples.is_empty(), "k = {k}");
            assert_eq!(r.hypotenuse, 1 << k);
        }
        assert!(pythagorean_hypotenuse_check(0, None).is_err());
        let r = pythagorean_hypotenuse_check(3, Some(3)).unwrap();
        assert_eq!(r.bound, 3);
        assert_eq!(pythagorean_hypotenuse_check(3, Some(100)).unwrap().bound, 7);
    }
}
