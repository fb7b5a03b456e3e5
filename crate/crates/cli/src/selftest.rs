//! Invariant checks shared by `invset selftest` and the acceptance suite.
//!
//! Each check returns one record flagged `PASS` or `FAIL`. Sizes come from
//! a [`Scale`] so the same code runs quickly from the command line and at
//! full size under test.

use invset::dynamics::{dirac_evolve, random_pair, ruban_pass_count, DiracState};
use invset::exactnum::{int, rational_reconstruction, ratio, Fixed, Rational};
use invset::experiments::{
    chsh_configs, chsh_statistic, classical_chsh_max, is_dyadic_value, parse_signs, pbr_describability_from_cosines,
    pbr_find_z_root, pbr_probabilities, random_generic_dyadic_cos, spherical_cos_rule, tsirelson_scan, PbrAngles,
};
use invset::hilbertbits::{
    born_probability, build_one_qubit, build_two_qubit_form_a, convert_form_a_to_b, joint_frequency, zeta, FormA,
    OneQubitSpec, Symbol,
};
use invset::numbertheory::{cos_rational_classify, doubling_sequence, pythagorean_hypotenuse_check, PiRational};
use invset::padic::{padic_dist, PAdicInt, Prime};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::record::RunRecord;
use crate::{format_seed, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    pub ultrametric_triples: usize,
    pub niven_max_den: i64,
    pub doubling_starts: usize,
    pub doubling_steps: usize,
    pub born_max_n: u32,
    pub form_states: usize,
    pub form_max_n: u32,
    pub chsh_n: u32,
    pub tsirelson_resolution: u32,
    pub tsirelson_trials: u64,
    pub spherical_triples: usize,
    pub pythagorean_max_k: u32,
    pub ruban_samples: u64,
    pub ruban_seeds: u64,
    pub dirac_max_n: u32,
    pub dirac_states: usize,
    pub pbr_instances: usize,
}

impl Scale {
    pub const QUICK: Scale = Scale {
        ultrametric_triples: 1000,
        niven_max_den: 48,
        doubling_starts: 100,
        doubling_steps: 10,
        born_max_n: 6,
        form_states: 100,
        form_max_n: 6,
        chsh_n: 7,
        tsirelson_resolution: 16,
        tsirelson_trials: 2000,
        spherical_triples: 1000,
        pythagorean_max_k: 10,
        ruban_samples: 10_000,
        ruban_seeds: 10,
        dirac_max_n: 6,
        dirac_states: 10,
        pbr_instances: 100,
    };

    pub const FULL: Scale = Scale {
        ultrametric_triples: 10_000,
        niven_max_den: 200,
        doubling_starts: 100,
        doubling_steps: 10,
        born_max_n: 8,
        form_states: 500,
        form_max_n: 7,
        chsh_n: 7,
        tsirelson_resolution: 64,
        tsirelson_trials: 100_000,
        spherical_triples: 10_000,
        pythagorean_max_k: 10,
        ruban_samples: 100_000,
        ruban_seeds: 100,
        dirac_max_n: 8,
        dirac_states: 50,
        pbr_instances: 1000,
    };
}

fn finish(mut rec: RunRecord, pass: bool) -> RunRecord {
    rec.flag(if pass { "PASS" } else { "FAIL" });
    rec
}

fn check(name: &str) -> RunRecord {
    let mut rec = RunRecord::new("selftest");
    rec.param("check", name);
    rec
}

fn sub_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Integers `1 + 2 + ... + 2^k` from their digit expansions.
pub fn padic_worked_values() -> RunRecord {
    let two = Prime::TWO;
    let from = |digits: &[u32]| PAdicInt::new(two, digits.to_vec()).expect("binary digits");
    let d1 = from(&[1, 1, 1]).dist(&from(&[1, 1, 0])).expect("same prime");
    let d2 = from(&[1, 1, 1, 1]).dist(&from(&[1, 1, 1, 0])).expect("same prime");
    let mut rec = check("padic_worked_values");
    rec.rational("d_7_3", &d1).rational("d_15_7", &d2);
    let pass = d1 == ratio(1, 4) && d2 == ratio(1, 8) && padic_dist(&int(7), &int(3), two) == d1;
    finish(rec, pass)
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    // p-power denominators and numerators show up often enough to matter
    let base: i64 = [2, 3, 5, 6, 10][rng.gen_range(0..5)];
    let num = rng.gen_range(-1_000_000i64..=1_000_000) * base.pow(rng.gen_range(0..6));
    let den = rng.gen_range(1i64..=1000) * base.pow(rng.gen_range(0..6));
    ratio(num, den)
}

pub fn ultrametric(scale: &Scale, seed: u64) -> RunRecord {
    let mut failures = 0usize;
    let mut total = 0usize;
    for (i, p) in [2u32, 3, 5].into_iter().enumerate() {
        let pr = Prime::new(p).expect("prime");
        let mut rng = sub_rng(seed, i as u64);
        for _ in 0..scale.ultrametric_triples {
            let (a, b, c) = (random_rational(&mut rng), random_rational(&mut rng), random_rational(&mut rng));
            let ac = padic_dist(&a, &c, pr);
            let bound = padic_dist(&a, &b, pr).max(padic_dist(&b, &c, pr));
            total += 1;
            if ac > bound {
                failures += 1;
            }
        }
    }
    let mut rec = check("ultrametric");
    rec.param("triples_per_prime", scale.ultrametric_triples);
    rec.rational("checked", &int(total as i64)).rational("failures", &int(failures as i64));
    finish(rec, failures == 0)
}

/// Rational verdicts of the classifier against 60-digit numerics with
/// bounded-denominator reconstruction.
pub fn niven(scale: &Scale) -> RunRecord {
    let bits = Fixed::DEFAULT_BITS;
    let max_den = BigInt::from(1_000_000);
    let tolerance = Fixed::from_rational(&ratio(1, 1_000_000_000_000), bits).mul(&Fixed::from_rational(&ratio(1, 1_000_000_000_000), bits));
    let expected: Vec<Rational> = vec![int(-1), ratio(-1, 2), int(0), ratio(1, 2), int(1)];
    let mut disagreements = 0usize;
    let mut angles = 0usize;
    let mut seen = Vec::new();
    for n in 1..=scale.niven_max_den {
        for m in 0..2 * n {
            if m.gcd(&n) != 1 && !(m == 0 && n == 1) {
                continue;
            }
            angles += 1;
            let a = PiRational::new(m, n);
            let numeric = Fixed::pi(bits).mul_int(m).div_int(n).cos();
            let guess = rational_reconstruction(&numeric.to_rational(), &max_den);
            let close = Fixed::from_rational(&guess, bits).sub(&numeric).abs() <= tolerance;
            let oracle = close.then_some(guess);
            let verdict = cos_rational_classify(&a).rational().cloned();
            if verdict != oracle {
                disagreements += 1;
            }
            if let Some(v) = verdict {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
    }
    seen.sort();
    let mut rec = check("niven");
    rec.param("max_denominator", scale.niven_max_den);
    rec.rational("angles", &int(angles as i64)).rational("disagreements", &int(disagreements as i64));
    rec.rational("distinct_rational_values", &int(seen.len() as i64));
    finish(rec, disagreements == 0 && seen == expected)
}

pub fn doubling(scale: &Scale, seed: u64) -> RunRecord {
    let mut rng = sub_rng(seed, 10);
    let mut failures = 0usize;
    for _ in 0..scale.doubling_starts {
        let start = loop {
            let den = rng.gen_range(2i64..=1000);
            let r = ratio(rng.gen_range(-4 * den..=4 * den), den);
            if !r.is_integer() {
                break r;
            }
        };
        let seq = doubling_sequence(&start, scale.doubling_steps);
        if seq.windows(2).any(|w| w[1].denom() <= w[0].denom()) {
            failures += 1;
        }
    }
    let mut rec = check("doubling_denominators");
    rec.param("starts", scale.doubling_starts).param("steps", scale.doubling_steps);
    rec.rational("failures", &int(failures as i64));
    finish(rec, failures == 0)
}

pub fn born(scale: &Scale) -> RunRecord {
    let mut failures = 0usize;
    let mut strings = 0usize;
    for n in 1..=scale.born_max_n {
        let len = 1u64 << n;
        for weight in 0..=len {
            let s = build_one_qubit(&OneQubitSpec { n, weight, phase_steps: 0 }).expect("in range");
            let want = Rational::new(weight.into(), len.into());
            for k in 0..len as i64 {
                strings += 1;
                if born_probability(&zeta(&s, k)) != want {
                    failures += 1;
                }
            }
        }
    }
    let mut rec = check("born_exactness");
    rec.param("max_N", scale.born_max_n);
    rec.rational("strings", &int(strings as i64)).rational("failures", &int(failures as i64));
    finish(rec, failures == 0)
}

/// A random form-A state whose conditional blocks are whole numbers of positions.
pub fn random_form_a<R: Rng>(rng: &mut R, max_n: u32) -> (u32, FormA) {
    let n = rng.gen_range(1..=max_n);
    let len = 1i64 << n;
    let k1 = rng.gen_range(0..=len);
    // dyadic with a denominator dividing the block length
    let w = |rng: &mut R, block: i64| {
        if block == 0 {
            return int(1);
        }
        let unit = 1i64 << block.trailing_zeros();
        ratio(rng.gen_range(0..=unit), unit)
    };
    let w1 = ratio(k1, len);
    let w2 = w(rng, k1);
    let w3 = w(rng, len - k1);
    let phi = |rng: &mut R| rng.gen_range(-len..len);
    (n, FormA { w1, w2, w3, phi1: phi(rng), phi2: phi(rng), phi3: phi(rng) })
}

pub fn form_equivalence(scale: &Scale, seed: u64) -> RunRecord {
    let mut rng = sub_rng(seed, 20);
    let pairs = [(Symbol::A, Symbol::A), (Symbol::A, Symbol::NotA), (Symbol::NotA, Symbol::A), (Symbol::NotA, Symbol::NotA)];
    let (mut converted, mut unrepresentable, mut failures) = (0usize, 0usize, 0usize);
    while converted < scale.form_states {
        let (n, form) = random_form_a(&mut rng, scale.form_max_n);
        let st = build_two_qubit_form_a(n, form).expect("blocks are whole");
        match convert_form_a_to_b(&st) {
            Ok(b) => {
                converted += 1;
                if pairs.iter().any(|&p| joint_frequency(&st, p) != joint_frequency(&b, p)) {
                    failures += 1;
                }
            }
            Err(_) => unrepresentable += 1,
        }
    }
    let mut rec = check("form_equivalence");
    rec.param("states", scale.form_states).param("max_N", scale.form_max_n);
    rec.rational("converted", &int(converted as i64));
    rec.rational("skipped_unrepresentable", &int(unrepresentable as i64));
    rec.rational("failures", &int(failures as i64));
    finish(rec, failures == 0)
}

pub fn classical_chsh() -> RunRecord {
    let (max, count) = classical_chsh_max();
    let mut rec = check("classical_chsh");
    rec.rational("max_s", &max).rational("strategies_at_max", &int(count as i64));
    finish(rec, max == int(2))
}

pub fn model_chsh(scale: &Scale) -> RunRecord {
    let c = ratio(45, 64);
    let signs = parse_signs("++-").expect("literal");
    let (z0, z1) = chsh_configs(scale.chsh_n, [c.clone(), c.clone(), c.clone(), c], signs).expect("dyadic");
    let mut rec = check("model_chsh");
    rec.param("N", scale.chsh_n);
    match chsh_statistic(&z0, &z1) {
        Ok(r) => {
            rec.rational("s", &r.s);
            let pass = r.s == ratio(180, 64) && r.s > int(2) && &r.s * &r.s < int(8);
            finish(rec, pass)
        }
        Err(e) => {
            rec.param("error", e);
            finish(rec, false)
        }
    }
}

pub fn tsirelson(scale: &Scale, seed: u64) -> RunRecord {
    let bound = 2.0 * std::f64::consts::SQRT_2;
    let r = tsirelson_scan(scale.tsirelson_resolution, scale.tsirelson_trials, seed).expect("resolution >= 8");
    let mut rec = check("tsirelson_scan");
    rec.param("resolution", scale.tsirelson_resolution).param("trials", scale.tsirelson_trials);
    rec.float("max_s", r.max_s);
    finish(rec, r.max_s >= bound - 1e-3 && r.max_s <= bound + 1e-9)
}

pub fn spherical_genericity(scale: &Scale, seed: u64) -> RunRecord {
    let mut rng = sub_rng(seed, 30);
    let mut dyadic = 0usize;
    for _ in 0..scale.spherical_triples {
        let c00 = random_generic_dyadic_cos(&mut rng, 8..=24);
        let ca = random_generic_dyadic_cos(&mut rng, 8..=24);
        let cg = random_generic_dyadic_cos(&mut rng, 8..=24);
        let v = spherical_cos_rule(&c00, &ca, &cg).expect("in range");
        if is_dyadic_value(&v) {
            dyadic += 1;
        }
    }
    let mut rec = check("spherical_genericity");
    rec.param("triples", scale.spherical_triples);
    rec.rational("dyadic_outputs", &int(dyadic as i64));
    finish(rec, dyadic == 0)
}

pub fn pythagorean(scale: &Scale) -> RunRecord {
    let mut found = 0usize;
    for k in 1..=scale.pythagorean_max_k {
        found += pythagorean_hypotenuse_check(k, None).expect("k in range").triples.len();
    }
    let mut rec = check("pythagorean_power_of_two");
    rec.param("max_k", scale.pythagorean_max_k);
    rec.rational("triples_found", &int(found as i64));
    finish(rec, found == 0)
}

pub fn ruban(scale: &Scale, seed: u64) -> RunRecord {
    let seeds = seed..seed + scale.ruban_seeds;
    let passes = ruban_pass_count(Prime::TWO, 64, scale.ruban_samples, seeds).expect("enough samples");
    let mut rec = check("ruban_frequency");
    rec.param("samples", scale.ruban_samples).param("seeds", scale.ruban_seeds);
    rec.rational("passes", &int(passes as i64));
    // at least 95% of runs
    finish(rec, passes as u64 * 100 >= 95 * scale.ruban_seeds)
}

pub fn dirac(scale: &Scale, seed: u64) -> RunRecord {
    let mut failures = 0usize;
    let mut rng = sub_rng(seed, 40);
    for _ in 0..scale.dirac_states {
        let n = rng.gen_range(1..=scale.dirac_max_n);
        let start = DiracState::new(random_pair(n, rng.gen()).expect("n in range"), 1);
        let (ca, cb) = (start.pair.s_a.count(Symbol::A), start.pair.s_b.count(Symbol::A));
        let mut st = start.clone();
        for t in 1..=1i64 << n {
            st = dirac_evolve(&st, 1);
            let conserved = st.pair.s_a.count(Symbol::A) == ca && st.pair.s_b.count(Symbol::A) == cb;
            let back = st.pair == start.pair;
            // the identity must appear exactly at 2^N unless the pair is rotation-symmetric
            let early_ok = t == 1 << n || !back || start.period() < 1 << n || symmetric(&start);
            if !conserved || !early_ok {
                failures += 1;
            }
        }
        if st.pair != start.pair {
            failures += 1;
        }
    }
    let mut rec = check("dirac_periodicity");
    rec.param("states", scale.dirac_states).param("max_N", scale.dirac_max_n);
    rec.rational("failures", &int(failures as i64));
    finish(rec, failures == 0)
}

fn symmetric(st: &DiracState) -> bool {
    let len = 1i64 << st.pair.n();
    (1..len).any(|k| zeta(&st.pair.s_a, k) == st.pair.s_a && zeta(&st.pair.s_b, -k) == st.pair.s_b)
}

pub fn pbr(scale: &Scale, seed: u64) -> RunRecord {
    let half_pi = PiRational::new(1, 2);
    let mut rng = sub_rng(seed, 50);
    let mut x_is_one = true;
    for _ in 0..8 {
        let beta = PiRational::new(rng.gen_range(0..64), 64);
        let p = pbr_probabilities(&PbrAngles { theta: half_pi, alpha: beta.scale(2), beta });
        x_is_one &= p.x.exact.as_ref().and_then(|q| q.classify().rational().cloned()) == Some(int(1));
    }
    let root = pbr_find_z_root(std::f64::consts::FRAC_PI_2, std::f64::consts::PI);
    let root_ok = root.is_some_and(|r| r.residual < 1e-12 && r.x_at_root.abs() > 1e-6);
    let (mut generic, mut generic_simultaneous, mut exceptional) = (0usize, 0usize, 0usize);
    for _ in 0..scale.pbr_instances {
        let u = random_generic_dyadic_cos(&mut rng, 4..=20);
        let v = random_generic_dyadic_cos(&mut rng, 4..=20);
        let r = pbr_describability_from_cosines(&u, &v, 64).expect("in range");
        if r.generic {
            generic += 1;
            generic_simultaneous += r.simultaneous as usize;
        } else if r.simultaneous {
            exceptional += 1;
        }
    }
    let mut rec = check("pbr");
    rec.param("instances", scale.pbr_instances);
    if let Some(r) = root {
        rec.float("root_alpha", r.alpha).float("root_residual", r.residual).float("x_at_root", r.x_at_root);
    }
    rec.rational("generic_instances", &int(generic as i64));
    rec.rational("generic_simultaneous", &int(generic_simultaneous as i64));
    rec.rational("exceptional_simultaneous", &int(exceptional as i64));
    finish(rec, x_is_one && root_ok && generic_simultaneous == 0)
}

/// All checks in a fixed order.
pub fn all(scale: &Scale, seed: u64) -> Vec<RunRecord> {
    let mut out = vec![
        padic_worked_values(),
        ultrametric(scale, seed),
        niven(scale),
        doubling(scale, seed),
        born(scale),
        form_equivalence(scale, seed),
        classical_chsh(),
        model_chsh(scale),
        tsirelson(scale, seed),
        spherical_genericity(scale, seed),
        pythagorean(scale),
        ruban(scale, seed),
        dirac(scale, seed),
        pbr(scale, seed),
    ];
    for r in &mut out {
        r.seed = Some(format_seed(seed));
    }
    out
}

pub fn run(seed: u64) -> Result<Vec<RunRecord>, Failure> {
    let records = all(&Scale::QUICK, seed);
    let failed: Vec<String> = records.iter().filter(|r| r.has_flag("FAIL")).map(|r| r.parameters["check"].clone()).collect();
    if failed.is_empty() {
        Ok(records)
    } else {
        Err(Failure::Invariant(records, format!("failed checks: {}", failed.join(", "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{Signed, ToPrimitive};

    #[test]
    fn random_rationals_vary() {
        let mut rng = sub_rng(1, 0);
        let xs: Vec<Rational> = (0..20).map(|_| random_rational(&mut rng)).collect();
        assert!(xs.iter().any(|x| x.is_negative()));
        assert!(xs.windows(2).any(|w| w[0] != w[1]));
        assert!(xs.iter().all(|x| x.denom().to_u64().is_some()));
    }

    #[test]
    fn quick_suite_passes() {
        for r in all(&Scale::QUICK, 0) {
            assert!(r.has_flag("PASS"), "{r:?}");
        }
    }
}
