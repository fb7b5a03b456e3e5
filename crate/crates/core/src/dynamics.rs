//! Shift-map selection, the Ruban digit-frequency check, and rest-frame
//! Dirac evolution of a spinor pair.

use num_traits::Signed;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::exactnum::{pow2, Rational};
use crate::hilbertbits::{zeta, BitString, BitsError, SpinorPair, Symbol};
use crate::padic::{PAdicInt, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("seed exhausted: need {need} digits at position {position}, have {have}")]
    SeedExhausted { need: usize, position: usize, have: usize },
    #[error("seed digit {0} is not binary")]
    NotBinary(u8),
    #[error("seed must be 2-adic, got p = {0}")]
    NotTwoAdic(Prime),
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: u64, got: u64 },
    #[error("mass-energy must be positive, got {0}")]
    NonPositiveEnergy(String),
}

/// A 2-adic digit sequence read by the binary shift map. `position` is the
/// number of digits already consumed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShiftSeed {
    digits: Vec<u8>,
    position: usize,
}

impl ShiftSeed {
    pub fn new(digits: Vec<u8>) -> Result<Self, DynamicsError> {
        if let Some(&d) = digits.iter().find(|&&d| d > 1) {
            return Err(DynamicsError::NotBinary(d));
        }
        Ok(Self { digits, position: 0 })
    }

    pub fn from_padic(z: &PAdicInt) -> Result<Self, DynamicsError> {
        if z.prime() != Prime::TWO {
            return Err(DynamicsError::NotTwoAdic(z.prime()));
        }
        Ok(Self { digits: z.digits().iter().map(|&d| d as u8).collect(), position: 0 })
    }

    pub fn random<R: Rng + ?Sized>(depth: usize, rng: &mut R) -> Self {
        Self { digits: (0..depth).map(|_| rng.gen_range(0..2u8)).collect(), position: 0 }
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn remaining(&self) -> usize {
        self.digits.len() - self.position
    }
}

/// Reads `N` digits least-significant first to form an index into `s`,
/// returns the symbol there, and shifts the seed by `N`.
pub fn shift_select(seed: &mut ShiftSeed, s: &BitString) -> Result<(usize, Symbol), DynamicsError> {
    let n = s.n() as usize;
    if seed.remaining() < n {
        return Err(DynamicsError::SeedExhausted { need: n, position: seed.position, have: seed.digits.len() });
    }
    let index = seed.digits[seed.position..seed.position + n]
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &d)| acc | (d as usize) << i);
    seed.position += n;
    Ok((index, s.get(index)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RubanReport {
    pub p: Prime,
    pub depth: usize,
    pub samples: u64,
    /// Occurrences of each digit value over all samples and positions.
    pub counts: Vec<u64>,
    pub frequencies: Vec<Rational>,
    /// Binomial standard deviation of one digit frequency.
    pub sigma: f64,
    pub max_deviation: f64,
    pub pass: bool,
}

pub const RUBAN_MIN_SAMPLES: u64 = 1000;
pub const RUBAN_SIGMAS: f64 = 4.0;

fn ruban_report(p: Prime, depth: usize, samples: u64, counts: Vec<u64>) -> RubanReport {
    let total: u64 = counts.iter().sum();
    let q = 1.0 / p.get() as f64;
    let sigma = (q * (1.0 - q) / total as f64).sqrt();
    let frequencies: Vec<Rational> = counts.iter().map(|&c| Rational::new(c.into(), total.into())).collect();
    let max_deviation = counts.iter().map(|&c| (c as f64 / total as f64 - q).abs()).fold(0.0, f64::max);
    RubanReport { p, depth, samples, counts, frequencies, sigma, max_deviation, pass: max_deviation <= RUBAN_SIGMAS * sigma }
}

/// Tallies digit values of `samples` Haar-random depth-`depth` p-adic
/// integers drawn from a generator seeded with `seed`.
pub fn ruban_frequency_test(p: Prime, depth: usize, samples: u64, seed: u64) -> Result<RubanReport, DynamicsError> {
    if samples < RUBAN_MIN_SAMPLES {
        return Err(DynamicsError::TooFewSamples { min: RUBAN_MIN_SAMPLES, got: samples });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if p == Prime::TWO {
        let mut ones = 0u64;
        for _ in 0..samples {
            let mut left = depth;
            while left > 0 {
                let take = left.min(64);
                let word = rng.next_u64();
                let word = if take == 64 { word } else { word & ((1u64 << take) - 1) };
                ones += word.count_ones() as u64;
                left -= take;
            }
        }
        let total = samples * depth as u64;
        return Ok(ruban_report(p, depth, samples, vec![total - ones, ones]));
    }
    ruban_frequency_with(p, depth, samples, |_| PAdicInt::random(p, depth, &mut rng))
}

/// Same tally over an arbitrary digit source; `draw(i)` yields sample `i`.
/// Used for negative controls.
pub fn ruban_frequency_with<F>(p: Prime, depth: usize, samples: u64, mut draw: F) -> Result<RubanReport, DynamicsError>
where
    F: FnMut(u64) -> PAdicInt,
{
    if samples < RUBAN_MIN_SAMPLES {
        return Err(DynamicsError::TooFewSamples { min: RUBAN_MIN_SAMPLES, got: samples });
    }
    let mut counts = vec![0u64; p.get() as usize];
    for i in 0..samples {
        for &d in draw(i).digits().iter().take(depth) {
            counts[d as usize] += 1;
        }
    }
    Ok(ruban_report(p, depth, samples, counts))
}

/// Number of seeds in `seeds` whose run passes.
pub fn ruban_pass_count(p: Prime, depth: usize, samples: u64, seeds: std::ops::Range<u64>) -> Result<usize, DynamicsError> {
    let reports: Result<Vec<RubanReport>, _> = seeds.into_par_iter().map(|s| ruban_frequency_test(p, depth, samples, s)).collect();
    Ok(reports?.iter().filter(|r| r.pass).count())
}

/// A rest-frame spinor pair evolving at `rate` steps of `zeta` per tick.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiracState {
    pub pair: SpinorPair,
    pub rate: i64,
    pub tick: i64,
}

impl DiracState {
    pub fn new(pair: SpinorPair, rate: i64) -> Self {
        Self { pair, rate, tick: 0 }
    }

    /// Ticks after which the state first repeats: `2^N / gcd(rate, 2^N)`.
    pub fn period(&self) -> u64 {
        let len = 1u64 << self.pair.n();
        let r = self.rate.unsigned_abs() % len;
        if r == 0 {
            1
        } else {
            len >> r.trailing_zeros()
        }
    }
}

/// Two uniformly random strings of length `2^N` from `seed`.
pub fn random_pair(n: u32, seed: u64) -> Result<SpinorPair, BitsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        let syms = (0..1usize << n).map(|_| if rng.gen_bool(0.5) { Symbol::A } else { Symbol::NotA }).collect();
        BitString::new(n, syms)
    };
    let s_a = draw()?;
    let s_b = draw()?;
    SpinorPair::new(s_a, s_b)
}

/// `S_a -> zeta^(rate t) S_a`, `S_b -> zeta^(-rate t) S_b`.
pub fn dirac_evolve(state: &DiracState, ticks: i64) -> DiracState {
    let steps = state.rate * ticks;
    DiracState {
        pair: SpinorPair { s_a: zeta(&state.pair.s_a, steps), s_b: zeta(&state.pair.s_b, -steps) },
        rate: state.rate,
        tick: state.tick + ticks,
    }
}

/// `omega = E` (with hbar = 1), the tick `Delta t = 2 pi / (2^N E)` as its
/// coefficient of pi, and the zeta-steps per unit time `2^N E / (2 pi)` as
/// its coefficient of `1/pi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyFrequency {
    pub omega: Rational,
    pub delta_t_pi_coeff: Rational,
    pub steps_per_unit_inv_pi_coeff: Rational,
}

pub fn energy_frequency(mass_energy: &Rational, n: u32) -> Result<EnergyFrequency, DynamicsError> {
    if !mass_energy.is_positive() {
        return Err(DynamicsError::NonPositiveEnergy(mass_energy.to_string()));
    }
    let len = pow2(n);
    Ok(EnergyFrequency {
        omega: mass_energy.clone(),
        delta_t_pi_coeff: Rational::from_integer(2.into()) / (&len * mass_energy),
        steps_per_unit_inv_pi_coeff: &len * mass_energy / Rational::from_integer(2.into()),
    })
}
