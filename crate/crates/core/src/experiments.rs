//! Experiment drivers on top of the bit-string representation.
//!
//! Mach-Zehnder, CHSH with one sample space per z-parity, the spherical
//! cosine rule behind the non-describability argument, a numeric Tsirelson
//! scan, and the PBR outcome probabilities.
//!
//! Everything that decides whether a configuration exists is exact. The one
//! floating-point path is [`tsirelson_scan`], which only checks a bound.
//!
//! CHSH sign convention: the Bell layout `S_a`/`S_b` built by
//! [`chsh_state`] has correlation `+cos theta`. A pairing with
//! [`Sign::Minus`] complements `S_b`, giving the singlet value `-cos theta`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::exactnum::{int, is_dyadic, is_dyadic_within, pow2, ratio, Fixed, QuadExtElement, Rational};
use crate::hilbertbits::{
    build_one_qubit, build_two_qubit_form_a, correlation, string_correlation, BitString, BitsError, FormA, OneQubitSpec,
    Symbol, TwoQubitState,
};
use crate::numbertheory::{cos_quadratic, sin_quadratic, AngleDescriptor, AngleKind, PiRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error("inconsistent history: {mode} measurement with a {kind} angle does not lie on the invariant set")]
    InconsistentHistory { mode: MzMode, kind: AngleKind },
    #[error("wrong sample space: pairing ({x},{y}) has parity {}, config is tagged z = {tag}", (x + y) % 2)]
    WrongSampleSpace { x: u8, y: u8, tag: u8 },
    #[error(transparent)]
    Bits(#[from] BitsError),
    #[error("cosine {0} outside [-1, 1]")]
    CosOutOfRange(String),
    #[error("cosine {0} is not dyadic")]
    NotDyadic(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MzMode {
    /// `x = 0`: both half-silvered mirrors present.
    Momentum,
    /// `x = 1`: second mirror removed.
    Position,
}

impl fmt::Display for MzMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MzMode::Momentum => "momentum",
            MzMode::Position => "position",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MzConfig {
    pub mode: MzMode,
    pub angle: AngleDescriptor,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MzOutcome {
    pub p_a: Rational,
    pub p_not_a: Rational,
    pub string: BitString,
}

/// Detector frequencies, counted from the bit string that realises the
/// interferometer output at depth `N`.
pub fn mach_zehnder(config: &MzConfig) -> Result<MzOutcome, ExperimentError> {
    let n = config.n;
    let len = pow2(n);
    let refuse = || ExperimentError::InconsistentHistory { mode: config.mode, kind: config.angle.kind };
    let spec = match config.mode {
        MzMode::Momentum => {
            if !matches!(config.angle.kind, AngleKind::MomentumConsistent | AngleKind::Exceptional) {
                return Err(refuse());
            }
            let c = config.angle.cos_phi.as_ref().ok_or_else(refuse)?;
            let weight = (int(1) + c) / int(2) * &len;
            if !weight.is_integer() {
                return Err(BitsError::NotRepresentable { n, reason: format!("cos^2(phi/2) = {} needs more bits", (int(1) + c) / int(2)) }.into());
            }
            OneQubitSpec { n, weight: to_u64(&weight), phase_steps: 0 }
        }
        MzMode::Position => {
            if !matches!(config.angle.kind, AngleKind::PositionConsistent | AngleKind::Exceptional) {
                return Err(refuse());
            }
            let a = config.angle.phi_over_pi.as_ref().ok_or_else(refuse)?;
            // n = 2^N phi / 2pi
            let steps = a * &len / int(2);
            if !steps.is_integer() {
                return Err(BitsError::NotRepresentable { n, reason: format!("phi/pi = {a} needs more bits") }.into());
            }
            let steps = steps.to_integer().mod_floor(&len.to_integer());
            OneQubitSpec { n, weight: 1 << (n - 1), phase_steps: steps.try_into().expect("fits") }
        }
    };
    let string = build_one_qubit(&spec)?;
    let total = Rational::from_integer(string.len().into());
    let p_a = Rational::from_integer(string.count(Symbol::A).into()) / &total;
    let p_not_a = Rational::from_integer(string.count(Symbol::NotA).into()) / &total;
    Ok(MzOutcome { p_a, p_not_a, string })
}

fn to_u64(r: &Rational) -> u64 {
    r.to_integer().try_into().expect("fits in u64")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Parses a sign pattern for the pairings `(0,0), (0,1), (1,0), (1,1)`.
/// Three characters give the last three, with `(0,0)` taken as `+`.
pub fn parse_signs(s: &str) -> Result<[Sign; 4], ExperimentError> {
    let chars: Vec<char> = s.trim().chars().collect();
    let chars = match chars.len() {
        3 => std::iter::once('+').chain(chars).collect(),
        4 => chars,
        _ => return Err(ExperimentError::Invalid(format!("sign pattern `{s}` must have 3 or 4 characters"))),
    };
    let mut out = [Sign::Plus; 4];
    for (slot, c) in out.iter_mut().zip(chars) {
        *slot = match c {
            '+' => Sign::Plus,
            '-' => Sign::Minus,
            _ => return Err(ExperimentError::Invalid(format!("bad sign `{c}`"))),
        };
    }
    Ok(out)
}

/// One sample space: the two pairings `(x, y)` with `x + y = tag (mod 2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChshConfig {
    n: u32,
    tag: u8,
    cosines: [Rational; 2],
    signs: [Sign; 2],
}

impl ChshConfig {
    /// `cosines[i]` and `signs[i]` belong to `Self::pairings(tag)[i]`.
    pub fn new(n: u32, tag: u8, cosines: [Rational; 2], signs: [Sign; 2]) -> Result<Self, ExperimentError> {
        if tag > 1 {
            return Err(ExperimentError::Invalid(format!("sample-space tag must be 0 or 1, got {tag}")));
        }
        for c in &cosines {
            if c.abs() > int(1) {
                return Err(ExperimentError::CosOutOfRange(c.to_string()));
            }
            if !is_dyadic(c) {
                return Err(ExperimentError::NotDyadic(c.to_string()));
            }
        }
        Ok(Self { n, tag, cosines, signs })
    }

    pub fn pairings(tag: u8) -> [(u8, u8); 2] {
        if tag == 0 {
            [(0, 0), (1, 1)]
        } else {
            [(0, 1), (1, 0)]
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn tag(&self) -> u8 {
        self.tag
    }

    fn slot(&self, pairing: (u8, u8)) -> Result<usize, ExperimentError> {
        let (x, y) = pairing;
        if x > 1 || y > 1 {
            return Err(ExperimentError::Invalid(format!("pairing ({x},{y})")));
        }
        if (x + y) % 2 != self.tag {
            return Err(ExperimentError::WrongSampleSpace { x, y, tag: self.tag });
        }
        Ok(Self::pairings(self.tag).iter().position(|&p| p == pairing).expect("parity matched"))
    }

    pub fn cosine(&self, pairing: (u8, u8)) -> Result<&Rational, ExperimentError> {
        Ok(&self.cosines[self.slot(pairing)?])
    }
}

/// The two-string state realising `cos theta_xy` for one pairing.
///
/// `S_a` is balanced (`theta_1 = pi/2`) and the `2^N (1 + c)/2` agreeing
/// positions are split between the two blocks of `S_b`. When that count is
/// even the split is equal and `S_b` is balanced too (the Bell layout);
/// when it is odd the first block takes the extra position.
pub fn chsh_state(config: &ChshConfig, pairing: (u8, u8)) -> Result<TwoQubitState, ExperimentError> {
    let slot = config.slot(pairing)?;
    let n = config.n;
    let c = &config.cosines[slot];
    let agree = (int(1) + c) / int(2) * pow2(n);
    if !agree.is_integer() {
        return Err(BitsError::NotRepresentable { n, reason: format!("cos theta = {c} needs more bits") }.into());
    }
    let agree = agree.to_integer();
    let half = pow2(n - 1);
    let in_first = Rational::from_integer(agree.div_ceil(&2.into()));
    let in_second = Rational::from_integer(&agree - in_first.to_integer());
    let form = FormA {
        w1: ratio(1, 2),
        w2: &in_first / &half,
        w3: int(1) - &in_second / &half,
        phi1: 0,
        phi2: 0,
        phi3: 0,
    };
    let state = build_two_qubit_form_a(n, form)?;
    Ok(match config.signs[slot] {
        Sign::Plus => state,
        Sign::Minus => state.complement_b(),
    })
}

/// Counted correlation for `pairing`, which must lie in this config's
/// sample space.
pub fn chsh_correlation(config: &ChshConfig, pairing: (u8, u8)) -> Result<Rational, ExperimentError> {
    Ok(correlation(&chsh_state(config, pairing)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChshReport {
    /// `C(0,0), C(0,1), C(1,0), C(1,1)`.
    pub correlations: [Rational; 4],
    pub s: Rational,
    pub violated: bool,
}

/// `S = |C(0,0) + C(0,1) + C(1,0) - C(1,1)|`, each `C` counted on the
/// sample space of its own parity.
pub fn chsh_statistic(z0: &ChshConfig, z1: &ChshConfig) -> Result<ChshReport, ExperimentError> {
    if z0.tag != 0 || z1.tag != 1 {
        return Err(ExperimentError::Invalid(format!("expected configs tagged 0 and 1, got {} and {}", z0.tag, z1.tag)));
    }
    let c00 = chsh_correlation(z0, (0, 0))?;
    let c01 = chsh_correlation(z1, (0, 1))?;
    let c10 = chsh_correlation(z1, (1, 0))?;
    let c11 = chsh_correlation(z0, (1, 1))?;
    let s = (&c00 + &c01 + &c10 - &c11).abs();
    let violated = s > int(2);
    Ok(ChshReport { correlations: [c00, c01, c10, c11], s, violated })
}

/// Builds the two configs from a single cosine magnitude per pairing and
/// a sign pattern ordered `(0,0), (0,1), (1,0), (1,1)`.
pub fn chsh_configs(n: u32, cosines: [Rational; 4], signs: [Sign; 4]) -> Result<(ChshConfig, ChshConfig), ExperimentError> {
    let [c00, c01, c10, c11] = cosines;
    let z0 = ChshConfig::new(n, 0, [c00, c11], [signs[0], signs[3]])?;
    let z1 = ChshConfig::new(n, 1, [c01, c10], [signs[1], signs[2]])?;
    Ok((z0, z1))
}

/// Largest `S` over the 16 deterministic local strategies
/// `a(x), b(y) in {+1, -1}`, and how many strategies reach it.
pub fn classical_chsh_max() -> (Rational, usize) {
    let mut best = int(0);
    let mut count = 0;
    for bits in 0u8..16 {
        let v = |i: u8| if bits >> i & 1 == 1 { 1i64 } else { -1 };
        let (a0, a1, b0, b1) = (v(0), v(1), v(2), v(3));
        let s = int((a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1).abs());
        match s.cmp(&best) {
            std::cmp::Ordering::Greater => {
                best = s;
                count = 1;
            }
            std::cmp::Ordering::Equal => count += 1,
            std::cmp::Ordering::Less => {}
        }
    }
    (best, count)
}

/// `S` when all four correlations are counted on one shared ensemble of
/// strings `a_x`, `b_y`: the situation the two-sample-space bookkeeping
/// avoids.
pub fn shared_ensemble_chsh(a: [&BitString; 2], b: [&BitString; 2]) -> Rational {
    let c = |x: usize, y: usize| string_correlation(a[x], b[y]);
    (c(0, 0) + c(0, 1) + c(1, 0) - c(1, 1)).abs()
}

/// `cos theta_01 = cos theta_00 cos alpha + sin theta_00 sin alpha cos gamma`
/// with both sines taken non-negative, as an exact element of
/// `Q(sqrt((1 - c00^2)(1 - ca^2)))`.
pub fn spherical_cos_rule(cos_theta00: &Rational, cos_alpha: &Rational, cos_gamma: &Rational) -> Result<QuadExtElement, ExperimentError> {
    for c in [cos_theta00, cos_alpha, cos_gamma] {
        if c.abs() > int(1) {
            return Err(ExperimentError::CosOutOfRange(c.to_string()));
        }
    }
    let one = int(1);
    let radicand = (&one - cos_theta00 * cos_theta00) * (&one - cos_alpha * cos_alpha);
    let surd = QuadExtElement::scaled_sqrt(cos_gamma.clone(), &radicand);
    let rational = QuadExtElement::rational(cos_theta00 * cos_alpha);
    Ok(surd.checked_add(&rational).expect("rational plus surd"))
}

/// True when `x` is a dyadic rational.
pub fn is_dyadic_value(x: &QuadExtElement) -> bool {
    x.classify().rational().is_some_and(is_dyadic)
}

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct TsirelsonReport {
    pub max_s: f64,
    /// Directions `a_0, a_1, b_0, b_1` attaining `max_s`.
    pub best: [Vec3; 4],
    pub grid_points: u64,
    pub trials: u64,
    pub seed: u64,
}

fn dot(u: &Vec3, v: &Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// `S` for singlet correlations `C(x, y) = -a_x . b_y`.
pub fn chsh_from_directions(d: &[Vec3; 4]) -> f64 {
    let c = |a: &Vec3, b: &Vec3| -dot(a, b);
    (c(&d[0], &d[2]) + c(&d[0], &d[3]) + c(&d[1], &d[2]) - c(&d[1], &d[3])).abs()
}

fn planar(t: f64) -> Vec3 {
    [t.cos(), t.sin(), 0.0]
}

fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    [r * t.cos(), r * t.sin(), z]
}

fn normalise(v: Vec3) -> Vec3 {
    let n = dot(&v, &v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn refine<R: Rng>(mut d: [Vec3; 4], rng: &mut R) -> ([Vec3; 4], f64) {
    let mut s = chsh_from_directions(&d);
    let mut step = 0.25;
    for _ in 0..48 {
        let i = rng.gen_range(0..4);
        let mut trial = d;
        trial[i] = normalise([
            d[i][0] + step * rng.gen_range(-1.0..1.0),
            d[i][1] + step * rng.gen_range(-1.0..1.0),
            d[i][2] + step * rng.gen_range(-1.0..1.0),
        ]);
        let t = chsh_from_directions(&trial);
        if t > s {
            d = trial;
            s = t;
        } else {
            step *= 0.9;
        }
    }
    (d, s)
}

fn trial_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// Maximum of `S` over unit directions on the sphere: a planar grid with
/// `a_0` fixed and `resolution` steps per turn, then `trials` seeded random
/// quadruples each refined by a short hill climb. The reduction is
/// independent of thread scheduling.
pub fn tsirelson_scan(resolution: u32, trials: u64, seed: u64) -> Result<TsirelsonReport, ExperimentError> {
    if resolution < 8 {
        return Err(ExperimentError::Invalid(format!("resolution {resolution} < 8")));
    }
    let step = std::f64::consts::TAU / resolution as f64;
    let r = resolution as u64;
    let grid = (0..r * r * r)
        .into_par_iter()
        .map(|k| {
            let (i, j, l) = (k / (r * r), k / r % r, k % r);
            let d = [planar(0.0), planar(i as f64 * step), planar(j as f64 * step), planar(l as f64 * step)];
            (chsh_from_directions(&d), k, d)
        })
        .reduce_with(better);
    let random = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let d = [random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng)];
            let (d, s) = refine(d, &mut rng);
            (s, r * r * r + i, d)
        })
        .reduce_with(better);
    let (max_s, _, best) = [grid, random].into_iter().flatten().reduce(better).expect("grid is non-empty");
    Ok(TsirelsonReport { max_s, best, grid_points: r * r * r, trials, seed })
}

fn better(x: (f64, u64, [Vec3; 4]), y: (f64, u64, [Vec3; 4])) -> (f64, u64, [Vec3; 4]) {
    // ties go to the lower index so the winner does not depend on scheduling
    match x.0.total_cmp(&y.0) {
        std::cmp::Ordering::Greater => x,
        std::cmp::Ordering::Less => y,
        std::cmp::Ordering::Equal => {
            if x.1 <= y.1 {
                x
            } else {
                y
            }
        }
    }
}

/// Preparation angle `theta` and circuit phases `alpha`, `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PbrAngles {
    pub theta: PiRational,
    pub alpha: PiRational,
    pub beta: PiRational,
}

/// A probability with its exact value when every trigonometric atom it
/// needs lies in a common quadratic field, and always a 60-digit rendering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbrValue {
    pub exact: Option<QuadExtElement>,
    /// The 256-bit fixed-point evaluation, as an exact binary fraction.
    pub approx: Rational,
    pub decimal: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbrProbabilities {
    pub x: PbrValue,
    pub z: PbrValue,
}

pub const PBR_DIGITS: usize = 60;

struct Atoms<T> {
    cos_theta: T,
    sin_theta: T,
    cos_a2b: T,
    cos_ab: T,
    cos_b: T,
}

impl PbrAngles {
    fn a2b(&self) -> PiRational {
        self.alpha.add(&self.beta.scale(-2))
    }

    fn ab(&self) -> PiRational {
        self.alpha.add(&self.beta.scale(-1))
    }

    fn exact_atoms(&self) -> Atoms<Option<QuadExtElement>> {
        Atoms {
            cos_theta: cos_quadratic(&self.theta),
            sin_theta: sin_quadratic(&self.theta),
            cos_a2b: cos_quadratic(&self.a2b()),
            cos_ab: cos_quadratic(&self.ab()),
            cos_b: cos_quadratic(&self.beta),
        }
    }

    fn fixed_atoms(&self, bits: u32) -> Atoms<Fixed> {
        let angle = |a: &PiRational| Fixed::pi(bits).mul_int(a.m()).div_int(a.n());
        Atoms {
            cos_theta: angle(&self.theta).cos(),
            sin_theta: angle(&self.theta).sin(),
            cos_a2b: angle(&self.a2b()).cos(),
            cos_ab: angle(&self.ab()).cos(),
            cos_b: angle(&self.beta).cos(),
        }
    }
}

/// With `t = cos theta`:
/// `X = (1 + t^2)/2 + (1 - t^2)/2 cos(alpha - 2 beta)`, and
/// `Z = X - (1 - t^2) - sin theta ((1 + t) cos(alpha - beta) + (1 - t) cos beta)`,
/// which are the half-angle forms
/// `X = c^4 + s^4 + 2 c^2 s^2 cos(alpha - 2beta)`,
/// `Z = X - 4 c^2 s^2 - 4 c^3 s cos(alpha - beta) - 4 c s^3 cos beta`.
fn x_exact(a: &Atoms<Option<QuadExtElement>>) -> Option<QuadExtElement> {
    let t = a.cos_theta.as_ref()?;
    let half = QuadExtElement::rational(ratio(1, 2));
    let one = QuadExtElement::rational(int(1));
    let t2 = t.checked_mul(t)?;
    let first = one.checked_add(&t2)?.checked_mul(&half)?;
    let weight = one.checked_sub(&t2)?.checked_mul(&half)?;
    if weight.classify().rational().is_some_and(Zero::is_zero) {
        return Some(first);
    }
    first.checked_add(&weight.checked_mul(a.cos_a2b.as_ref()?)?)
}

fn z_exact(a: &Atoms<Option<QuadExtElement>>, x: &QuadExtElement) -> Option<QuadExtElement> {
    let t = a.cos_theta.as_ref()?;
    let st = a.sin_theta.as_ref()?;
    let one = QuadExtElement::rational(int(1));
    let one_minus_t2 = one.checked_sub(&t.checked_mul(t)?)?;
    let base = x.checked_sub(&one_minus_t2)?;
    if st.classify().rational().is_some_and(Zero::is_zero) {
        return Some(base);
    }
    let w = a.cos_ab.as_ref()?;
    let v = a.cos_b.as_ref()?;
    let inner = one.checked_add(t)?.checked_mul(w)?.checked_add(&one.checked_sub(t)?.checked_mul(v)?)?;
    base.checked_sub(&st.checked_mul(&inner)?)
}

fn x_fixed(a: &Atoms<Fixed>) -> Fixed {
    let bits = a.cos_theta.bits();
    let one = Fixed::from_int(1, bits);
    let t2 = a.cos_theta.mul(&a.cos_theta);
    one.add(&t2).div_int(2).add(&one.sub(&t2).div_int(2).mul(&a.cos_a2b))
}

fn z_fixed(a: &Atoms<Fixed>, x: &Fixed) -> Fixed {
    let bits = a.cos_theta.bits();
    let one = Fixed::from_int(1, bits);
    let t = &a.cos_theta;
    let inner = one.add(t).mul(&a.cos_ab).add(&one.sub(t).mul(&a.cos_b));
    x.sub(&one.sub(&t.mul(t))).sub(&a.sin_theta.mul(&inner))
}

pub fn pbr_probabilities(angles: &PbrAngles) -> PbrProbabilities {
    let exact = angles.exact_atoms();
    let fixed = angles.fixed_atoms(Fixed::DEFAULT_BITS);
    let xf = x_fixed(&fixed);
    let zf = z_fixed(&fixed, &xf);
    let xe = x_exact(&exact);
    let ze = xe.as_ref().and_then(|x| z_exact(&exact, x));
    let render = |e: &Option<QuadExtElement>, f: &Fixed| match e {
        Some(q) => q.to_decimal(PBR_DIGITS),
        None => f.to_decimal(PBR_DIGITS),
    };
    PbrProbabilities {
        x: PbrValue { decimal: render(&xe, &xf), approx: xf.to_rational(), exact: xe },
        z: PbrValue { decimal: render(&ze, &zf), approx: zf.to_rational(), exact: ze },
    }
}

/// `X` and `Z` in double precision, for root finding and scans.
pub fn pbr_xz_f64(theta: f64, alpha: f64, beta: f64) -> (f64, f64) {
    let t = theta.cos();
    let st = theta.sin();
    let x = (1.0 + t * t) / 2.0 + (1.0 - t * t) / 2.0 * (alpha - 2.0 * beta).cos();
    let z = x - (1.0 - t * t) - st * ((1.0 + t) * (alpha - beta).cos() + (1.0 - t) * beta.cos());
    (x, z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbrRoot {
    pub alpha: f64,
    pub residual: f64,
    pub x_at_root: f64,
}

/// A root in `alpha` of `Z(theta, alpha, beta)` by sign-change scan over
/// `[0, 2pi)` followed by bisection.
pub fn pbr_find_z_root(theta: f64, beta: f64) -> Option<PbrRoot> {
    let z = |a: f64| pbr_xz_f64(theta, a, beta).1;
    let steps = 4096;
    let h = std::f64::consts::TAU / steps as f64;
    (0..steps).find_map(|k| {
        let (mut lo, mut hi) = (k as f64 * h, (k + 1) as f64 * h);
        let (zl, zh) = (z(lo), z(hi));
        if zl == 0.0 {
            return Some(lo);
        }
        if zl.signum() == zh.signum() {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if z(mid).signum() == zl.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(if z(lo).abs() < z(hi).abs() { lo } else { hi })
    })
    .map(|alpha| PbrRoot { alpha, residual: z(alpha).abs(), x_at_root: pbr_xz_f64(theta, alpha, beta).0 })
}

/// Which of `cos(alpha - 2beta)`, `cos beta`, `cos(alpha - beta)` are
/// `N`-bit describable, and so which of `X`, `Z` can be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbrDescribability {
    pub n: u32,
    pub cos_a2b: Option<QuadExtElement>,
    pub cos_b: Option<QuadExtElement>,
    /// Candidate values of `cos(alpha - beta)`. From cosines alone the signs
    /// of the sines are unknown, giving
    /// `cos(a-2b) cos b -/+ sin(a-2b) sin b`; from angles there is one value.
    pub cos_ab: Vec<QuadExtElement>,
    pub x_describable: bool,
    pub z_describable: bool,
    pub simultaneous: bool,
    /// `sin(alpha - 2beta) sin beta = 0`: the addition identity collapses.
    pub degenerate: bool,
    /// `sin(alpha - 2beta) sin beta` is irrational, so `cos(alpha - beta)`
    /// cannot be rational when the other two cosines are. Exceptions such
    /// as `u = 3/4, v = 1/8` exist where `1 - u^2` and `1 - v^2` share a
    /// squarefree part.
    pub generic: bool,
}

fn describable(x: &Option<QuadExtElement>, n: u32) -> bool {
    x.as_ref().and_then(|q| q.classify().rational().cloned()).is_some_and(|r| is_dyadic_within(&r, n))
}

fn sine_product_irrational(cos_a2b: &Option<QuadExtElement>, cos_b: &Option<QuadExtElement>) -> bool {
    let rational = |x: &Option<QuadExtElement>| x.as_ref().and_then(|q| q.classify().rational().cloned());
    match (rational(cos_a2b), rational(cos_b)) {
        (Some(u), Some(v)) => {
            let radicand = (int(1) - &u * &u) * (int(1) - &v * &v);
            !QuadExtElement::scaled_sqrt(int(1), &radicand).is_rational()
        }
        _ => true,
    }
}

fn finish_report(n: u32, cos_a2b: Option<QuadExtElement>, cos_b: Option<QuadExtElement>, cos_ab: Vec<QuadExtElement>, degenerate: bool) -> PbrDescribability {
    let generic = !degenerate && sine_product_irrational(&cos_a2b, &cos_b);
    let x_describable = describable(&cos_a2b, n);
    let ab_ok = cos_ab.iter().any(|w| describable(&Some(w.clone()), n));
    let z_describable = ab_ok && describable(&cos_b, n);
    PbrDescribability { n, x_describable, z_describable, simultaneous: x_describable && z_describable, cos_a2b, cos_b, cos_ab, degenerate, generic }
}

pub fn pbr_describability_report(angles: &PbrAngles, n: u32) -> PbrDescribability {
    let atoms = angles.exact_atoms();
    let degenerate = angles.a2b().n() == 1 || angles.beta.n() == 1;
    finish_report(n, atoms.cos_a2b, atoms.cos_b, atoms.cos_ab.into_iter().collect(), degenerate)
}

/// Report from exact cosines `u = cos(alpha - 2beta)`, `v = cos beta`,
/// using `cos(alpha - beta) = u v -/+ sqrt((1 - u^2)(1 - v^2))`.
pub fn pbr_describability_from_cosines(u: &Rational, v: &Rational, n: u32) -> Result<PbrDescribability, ExperimentError> {
    for c in [u, v] {
        if c.abs() > int(1) {
            return Err(ExperimentError::CosOutOfRange(c.to_string()));
        }
    }
    let one = int(1);
    let radicand = (&one - u * u) * (&one - v * v);
    let uv = QuadExtElement::rational(u * v);
    let branches: Vec<QuadExtElement> = [int(1), int(-1)]
        .iter()
        .map(|s| uv.checked_add(&QuadExtElement::scaled_sqrt(s.clone(), &radicand)).expect("same field"))
        .fold(Vec::new(), |mut acc, w| {
            if !acc.contains(&w) {
                acc.push(w);
            }
            acc
        });
    let degenerate = radicand.is_zero();
    Ok(finish_report(n, Some(u.clone().into()), Some(v.clone().into()), branches, degenerate))
}

/// Random dyadic in `[-1, 1]` with denominator `2^k`, `k` in `bits`.
pub fn random_dyadic_cos<R: Rng>(rng: &mut R, bits: std::ops::RangeInclusive<u32>) -> Rational {
    let k = rng.gen_range(bits);
    let den = 1i64 << k;
    ratio(rng.gen_range(-den..=den), den)
}

/// Open-interval variant: never `0` or `+-1`.
pub fn random_generic_dyadic_cos<R: Rng>(rng: &mut R, bits: std::ops::RangeInclusive<u32>) -> Rational {
    loop {
        let c = random_dyadic_cos(rng, bits.clone());
        if !c.is_zero() && !c.abs().is_one() {
            return c;
        }
    }
}
