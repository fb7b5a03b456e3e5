//! Bit-string realisations of one- and two-qubit Hilbert vectors.
//!
//! A one-qubit vector `cos(theta/2)|a> + e^{i phi} sin(theta/2)|not a>` is
//! read as an uncertain selection from a string of `2^N` symbols whose first
//! `2^N cos^2(theta/2)` entries are `A`, cyclically rotated `n` times by
//! [`zeta`] where `phi = 2 pi n / 2^N`. Two qubits are a pair of aligned
//! strings; joint statistics come from counting aligned positions.
//!
//! Symbols are abstract (`A` / `NotA`); detector labels `a`, `b`, `0`, `1`
//! are views onto the same alphabet. In text form `A` renders as `1`.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactnum::{int, is_dyadic_within, pow2, Rational};

/// Longest string this module will materialise is `2^MAX_N` symbols.
pub const MAX_N: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitsError {
    #[error("N = {0} outside 1..={MAX_N}")]
    DepthOutOfRange(u32),
    #[error("length {len} is not 2^{n}")]
    LengthMismatch { len: usize, n: u32 },
    #[error("weight {weight} outside [0, {max}]")]
    WeightOutOfRange { weight: String, max: String },
    #[error("not representable at N = {n}: {reason}")]
    NotRepresentable { n: u32, reason: String },
    #[error("strings have different N ({0} and {1})")]
    DepthMismatch(u32, u32),
    #[error("sigma_{axis} needs N >= {min}, got N = {n}")]
    TooShort { axis: u8, n: u32, min: u32 },
    #[error("Pauli axis must be 1, 2 or 3, got {0}")]
    BadAxis(u8),
    #[error("expected a form-{0} state")]
    WrongLayout(char),
    #[error("cannot parse bit string `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    A,
    NotA,
}

impl Symbol {
    pub fn complement(self) -> Self {
        match self {
            Symbol::A => Symbol::NotA,
            Symbol::NotA => Symbol::A,
        }
    }

    fn bit(self) -> char {
        match self {
            Symbol::A => '1',
            Symbol::NotA => '0',
        }
    }
}

/// A string of exactly `2^N` symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    n: u32,
    symbols: Vec<Symbol>,
}

fn check_depth(n: u32) -> Result<(), BitsError> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(BitsError::DepthOutOfRange(n))
    }
}

impl BitString {
    pub fn new(n: u32, symbols: Vec<Symbol>) -> Result<Self, BitsError> {
        check_depth(n)?;
        if symbols.len() != 1usize << n {
            return Err(BitsError::LengthMismatch { len: symbols.len(), n });
        }
        Ok(Self { n, symbols })
    }

    pub fn uniform(n: u32, s: Symbol) -> Result<Self, BitsError> {
        check_depth(n)?;
        Ok(Self { n, symbols: vec![s; 1 << n] })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn get(&self, i: usize) -> Symbol {
        self.symbols[i]
    }

    pub fn count(&self, s: Symbol) -> usize {
        self.symbols.iter().filter(|&&x| x == s).count()
    }

    pub fn complement(&self) -> Self {
        Self { n: self.n, symbols: self.symbols.iter().map(|s| s.complement()).collect() }
    }

    /// Rotates the sub-range `range` by `power` steps of [`zeta`], leaving
    /// the rest of the string alone.
    pub fn rotate_segment(&self, range: Range<usize>, power: i64) -> Self {
        let mut symbols = self.symbols.clone();
        rotate_slice(&mut symbols[range], power);
        Self { n: self.n, symbols }
    }

    /// `(A, NotA, ...)` runs, in order.
    pub fn runs(&self) -> Vec<(Symbol, usize)> {
        let mut out: Vec<(Symbol, usize)> = Vec::new();
        for &s in &self.symbols {
            match out.last_mut() {
                Some((last, len)) if *last == s => *len += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }

    /// Run-length text such as `"3A1N4N"` style `A3N1` pairs: `A3 N1 A4`.
    pub fn run_length_string(&self) -> String {
        self.runs()
            .iter()
            .map(|(s, len)| format!("{}{}", if *s == Symbol::A { 'A' } else { 'N' }, len))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn rotate_slice(s: &mut [Symbol], power: i64) {
    if s.is_empty() {
        return;
    }
    let k = power.rem_euclid(s.len() as i64) as usize;
    // zeta moves the last element to the front
    s.rotate_right(k);
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.bit())?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let symbols = s
            .trim()
            .chars()
            .map(|c| match c {
                '1' => Ok(Symbol::A),
                '0' => Ok(Symbol::NotA),
                _ => Err(BitsError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let len = symbols.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(BitsError::Parse(s.to_string()));
        }
        BitString::new(len.trailing_zeros(), symbols)
    }
}

/// The cyclic permutation `zeta^power`: for `power = 1` the last element
/// moves to the front. `zeta^(2^N)` is the identity.
pub fn zeta(s: &BitString, power: i64) -> BitString {
    let mut out = s.clone();
    rotate_slice(&mut out.symbols, power);
    out
}

/// Parameters of a one-qubit string: `weight = 2^N cos^2(theta/2)` symbols
/// `A`, and phase `phi = 2 pi phase_steps / 2^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OneQubitSpec {
    pub n: u32,
    pub weight: u64,
    pub phase_steps: u64,
}

impl OneQubitSpec {
    /// `cos^2(theta/2)` as an exact dyadic.
    pub fn cos2_half_theta(&self) -> Rational {
        Rational::new(BigInt::from(self.weight), BigInt::one() << self.n as usize)
    }

    /// `phi / pi = 2 * phase_steps / 2^N`.
    pub fn phi_over_pi(&self) -> Rational {
        Rational::new(BigInt::from(2 * self.phase_steps), BigInt::one() << self.n as usize)
    }
}

pub fn build_one_qubit(spec: &OneQubitSpec) -> Result<BitString, BitsError> {
    check_depth(spec.n)?;
    let len = 1u64 << spec.n;
    if spec.weight > len {
        return Err(BitsError::WeightOutOfRange { weight: spec.weight.to_string(), max: len.to_string() });
    }
    if spec.phase_steps >= len {
        return Err(BitsError::WeightOutOfRange { weight: spec.phase_steps.to_string(), max: (len - 1).to_string() });
    }
    let layout = layout_conditional(spec.n, &[len as usize], &[Rational::new(BigInt::from(spec.weight), BigInt::from(len))])?;
    Ok(zeta(&layout, spec.phase_steps as i64))
}

/// Recovers the canonical spec of a string built by [`build_one_qubit`].
/// Strings with no `NotA` or no `A` decode with `phase_steps = 0`, since
/// rotation cannot be observed on them.
pub fn decode_one_qubit(s: &BitString) -> Option<OneQubitSpec> {
    let weight = s.count(Symbol::A) as u64;
    let len = s.len() as u64;
    if weight == 0 || weight == len {
        return Some(OneQubitSpec { n: s.n, weight, phase_steps: 0 });
    }
    // the single A-run starts where a NotA is followed by an A
    let start = (0..s.len()).find(|&i| s.get(i) == Symbol::A && s.get((i + s.len() - 1) % s.len()) == Symbol::NotA)?;
    let spec = OneQubitSpec { n: s.n, weight, phase_steps: start as u64 };
    (build_one_qubit(&spec).ok()? == *s).then_some(spec)
}

pub fn born_probability(s: &BitString) -> Rational {
    Rational::new(BigInt::from(s.count(Symbol::A)), BigInt::from(s.len()))
}

/// Lays out a new string over a partition of the `2^N` positions into
/// consecutive blocks: within block `i` the first `fractions[i]` of the
/// positions are `A`, the rest `NotA`.
///
/// This is the step that builds a qubit's string conditioned on the strings
/// already laid out (the partition is the one they induce); repeating it gives
/// m-qubit layouts.
pub fn layout_conditional(n: u32, blocks: &[usize], fractions: &[Rational]) -> Result<BitString, BitsError> {
    check_depth(n)?;
    assert_eq!(blocks.len(), fractions.len());
    let mut symbols = Vec::with_capacity(1 << n);
    for (&len, w) in blocks.iter().zip(fractions) {
        if *w < int(0) || *w > int(1) {
            return Err(BitsError::WeightOutOfRange { weight: w.to_string(), max: "1".into() });
        }
        let count = w * Rational::from_integer(BigInt::from(len));
        if !count.is_integer() {
            return Err(BitsError::NotRepresentable { n, reason: format!("{w} of a block of {len} is not a whole number of positions") });
        }
        let count = count.to_integer().to_usize().expect("fits");
        symbols.extend(std::iter::repeat_n(Symbol::A, count));
        symbols.extend(std::iter::repeat_n(Symbol::NotA, len - count));
    }
    BitString::new(n, symbols)
}

/// Form A: `cos(t1/2)|a>|psi_b(t2,p2)> + e^{i p1} sin(t1/2)|not a>|psi_b(t3,p3)>`.
/// Weights are `cos^2` of the half angles, `w2` and `w3` relative to their block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormA {
    pub w1: Rational,
    pub w2: Rational,
    pub w3: Rational,
    pub phi1: i64,
    pub phi2: i64,
    pub phi3: i64,
}

/// Form B: `cos(t6/2)|psi_a(t4,p4)>|b> + e^{i p6} sin(t6/2)|psi_a(t5,p5)>|not b>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormB {
    pub w6: Rational,
    pub w4: Rational,
    pub w5: Rational,
    pub phi4: i64,
    pub phi5: i64,
    pub phi6: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoQubitLayout {
    A(FormA),
    B(FormB),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoQubitState {
    n: u32,
    s_a: BitString,
    s_b: BitString,
    layout: TwoQubitLayout,
}

fn check_weight(n: u32, name: &str, w: &Rational) -> Result<(), BitsError> {
    if *w < int(0) || *w > int(1) {
        return Err(BitsError::WeightOutOfRange { weight: format!("{name} = {w}"), max: "1".into() });
    }
    if !is_dyadic_within(w, n) {
        return Err(BitsError::NotRepresentable { n, reason: format!("{name} = {w} is not a dyadic with at most {n} bits") });
    }
    Ok(())
}

fn block_len(n: u32, w: &Rational) -> usize {
    (w * pow2(n)).to_integer().to_usize().expect("block fits")
}

/// Lays out the form-A strings. Block phases rotate the `A`-block and the
/// `NotA`-block of `S_b`; the joint phase `phi1` rotates both strings and is
/// applied last.
pub fn build_two_qubit_form_a(n: u32, form: FormA) -> Result<TwoQubitState, BitsError> {
    check_depth(n)?;
    for (name, w) in [("w1", &form.w1), ("w2", &form.w2), ("w3", &form.w3)] {
        check_weight(n, name, w)?;
    }
    let len = 1usize << n;
    let first = block_len(n, &form.w1);
    let s_a = layout_conditional(n, &[len], std::slice::from_ref(&form.w1))?;
    let s_b = layout_conditional(n, &[first, len - first], &[form.w2.clone(), form.w3.clone()])?;
    let s_b = s_b.rotate_segment(0..first, form.phi2).rotate_segment(first..len, form.phi3);
    Ok(TwoQubitState {
        n,
        s_a: zeta(&s_a, form.phi1),
        s_b: zeta(&s_b, form.phi1),
        layout: TwoQubitLayout::A(form),
    })
}

/// Lays out the form-B strings (mirror image of form A with the roles of
/// the two strings exchanged); `phi6` is the joint phase.
pub fn build_two_qubit_form_b(n: u32, form: FormB) -> Result<TwoQubitState, BitsError> {
    check_depth(n)?;
    for (name, w) in [("w6", &form.w6), ("w4", &form.w4), ("w5", &form.w5)] {
        check_weight(n, name, w)?;
    }
    let len = 1usize << n;
    let first = block_len(n, &form.w6);
    let s_b = layout_conditional(n, &[len], std::slice::from_ref(&form.w6))?;
    let s_a = layout_conditional(n, &[first, len - first], &[form.w4.clone(), form.w5.clone()])?;
    let s_a = s_a.rotate_segment(0..first, form.phi4).rotate_segment(first..len, form.phi5);
    Ok(TwoQubitState {
        n,
        s_a: zeta(&s_a, form.phi6),
        s_b: zeta(&s_b, form.phi6),
        layout: TwoQubitLayout::B(form),
    })
}

/// Rewrites a form-A state in form B using
/// `c1 c2 = c4 c6`, `s1 c3 = s4 c6`, `c1 s2 = c5 s6`, `s1 s3 = s5 s6` (on
/// squared half-angle cosines) and `phi4 = phi1`, `phi6 = phi2`,
/// `phi5 = phi1 + phi3 - phi2`. An empty block gets weight 1.
pub fn convert_form_a_to_b(state: &TwoQubitState) -> Result<TwoQubitState, BitsError> {
    let TwoQubitLayout::A(a) = &state.layout else {
        return Err(BitsError::WrongLayout('A'));
    };
    let one = int(1);
    let p_ab = &a.w1 * &a.w2;
    let p_nab = (&one - &a.w1) * &a.w3;
    let p_anb = &a.w1 * (&one - &a.w2);
    let w6 = &p_ab + &p_nab;
    let w4 = if w6.is_zero() { one.clone() } else { &p_ab / &w6 };
    let w5 = if w6.is_one() { one.clone() } else { &p_anb / (&one - &w6) };
    let form = FormB { w6, w4, w5, phi4: a.phi1, phi5: a.phi1 + a.phi3 - a.phi2, phi6: a.phi2 };
    build_two_qubit_form_b(state.n, form)
}

impl TwoQubitState {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn s_a(&self) -> &BitString {
        &self.s_a
    }

    pub fn s_b(&self) -> &BitString {
        &self.s_b
    }

    pub fn layout(&self) -> &TwoQubitLayout {
        &self.layout
    }

    /// The same state with `S_b` complemented: every aligned pair flips from
    /// agreeing to disagreeing, negating the correlation.
    pub fn complement_b(&self) -> Self {
        Self { s_b: self.s_b.complement(), ..self.clone() }
    }
}

/// Fraction of aligned positions of two strings carrying `(x, y)`.
pub fn pair_frequency(a: &BitString, b: &BitString, pair: (Symbol, Symbol)) -> Rational {
    assert_eq!(a.len(), b.len(), "strings must be aligned");
    let hits = a.symbols.iter().zip(&b.symbols).filter(|&(&x, &y)| (x, y) == pair).count();
    Rational::new(BigInt::from(hits), BigInt::from(a.len()))
}

pub fn joint_frequency(state: &TwoQubitState, pair: (Symbol, Symbol)) -> Rational {
    pair_frequency(&state.s_a, &state.s_b, pair)
}

/// `p(same) - p(different)` over aligned positions.
pub fn string_correlation(a: &BitString, b: &BitString) -> Rational {
    assert_eq!(a.len(), b.len(), "strings must be aligned");
    let same = a.symbols.iter().zip(&b.symbols).filter(|(x, y)| x == y).count() as i64;
    let len = a.len() as i64;
    Rational::new(BigInt::from(2 * same - len), BigInt::from(len))
}

/// `C = p(A,B) + p(NotA,NotB) - p(A,NotB) - p(NotA,B)`.
pub fn correlation(state: &TwoQubitState) -> Rational {
    use Symbol::*;
    joint_frequency(state, (A, A)) + joint_frequency(state, (NotA, NotA))
        - joint_frequency(state, (A, NotA))
        - joint_frequency(state, (NotA, A))
}

/// The two Weyl components of a rest-frame Dirac spinor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinorPair {
    pub s_a: BitString,
    pub s_b: BitString,
}

impl SpinorPair {
    pub fn new(s_a: BitString, s_b: BitString) -> Result<Self, BitsError> {
        if s_a.n != s_b.n {
            return Err(BitsError::DepthMismatch(s_a.n, s_b.n));
        }
        Ok(Self { s_a, s_b })
    }

    pub fn n(&self) -> u32 {
        self.s_a.n
    }
}

fn concat(n: u32, first: Vec<Symbol>, second: Vec<Symbol>) -> BitString {
    let mut symbols = first;
    symbols.extend(second);
    BitString { n, symbols }
}

/// Pauli matrix `sigma_axis` acting on one string viewed as the
/// concatenation of two halves. `-1` is symbol complement and `i` is a
/// quarter-period rotation `zeta^(2^(N-3))` of a half:
///
/// * `sigma_1`: `(h1 || h2) -> h2 || h1`
/// * `sigma_2`: `(h1 || h2) -> zeta^q(not h2) || zeta^q(h1)`
/// * `sigma_3`: `(h1 || h2) -> h1 || not h2`
pub fn pauli_string(axis: u8, s: &BitString) -> Result<BitString, BitsError> {
    let n = s.n;
    let half = s.len() / 2;
    let (h1, h2) = s.symbols.split_at(half);
    match axis {
        1 => Ok(concat(n, h2.to_vec(), h1.to_vec())),
        2 => {
            if n < 3 {
                return Err(BitsError::TooShort { axis, n, min: 3 });
            }
            let q = 1i64 << (n - 3);
            let mut top: Vec<Symbol> = h2.iter().map(|x| x.complement()).collect();
            let mut bottom = h1.to_vec();
            rotate_slice(&mut top, q);
            rotate_slice(&mut bottom, q);
            Ok(concat(n, top, bottom))
        }
        3 => Ok(concat(n, h1.to_vec(), h2.iter().map(|x| x.complement()).collect())),
        _ => Err(BitsError::BadAxis(axis)),
    }
}

/// `sigma_axis` applied to both Weyl components.
pub fn pauli_apply(axis: u8, pair: &SpinorPair) -> Result<SpinorPair, BitsError> {
    Ok(SpinorPair { s_a: pauli_string(axis, &pair.s_a)?, s_b: pauli_string(axis, &pair.s_b)? })
}

/// `gamma_i (S_a, S_b) = (sigma_i S_b, -sigma_i S_a)`, with `-1` acting as
/// symbol complement.
pub fn gamma_apply(axis: u8, pair: &SpinorPair) -> Result<SpinorPair, BitsError> {
    Ok(SpinorPair { s_a: pauli_string(axis, &pair.s_b)?, s_b: pauli_string(axis, &pair.s_a)?.complement() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;
    use proptest::prelude::*;
    use Symbol::{NotA as N, A};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn one_qubit_examples() {
        let s = build_one_qubit(&OneQubitSpec { n: 2, weight: 2, phase_steps: 0 }).unwrap();
        assert_eq!(s.symbols(), &[A, A, N, N]);
        let s = build_one_qubit(&OneQubitSpec { n: 2, weight: 2, phase_steps: 1 }).unwrap();
        assert_eq!(s.symbols(), &[N, A, A, N]);
        let s = build_one_qubit(&OneQubitSpec { n: 1, weight: 2, phase_steps: 1 }).unwrap();
        assert_eq!(s.symbols(), &[A, A]);
        assert!(build_one_qubit(&OneQubitSpec { n: 2, weight: 5, phase_steps: 0 }).is_err());
        assert!(build_one_qubit(&OneQubitSpec { n: 2, weight: 1, phase_steps: 4 }).is_err());
    }

    #[test]
    fn zeta_examples() {
        let s = bs("1000");
        assert_eq!(zeta(&s, 1), bs("0100"));
        assert_eq!(zeta(&s, 4), s);
        assert_eq!(zeta(&s, 0), s);
        assert_eq!(zeta(&s, -1), bs("0001"));
    }

    #[test]
    fn born_examples() {
        assert_eq!(born_probability(&bs("1100")), ratio(1, 2));
        assert_eq!(born_probability(&BitString::uniform(3, A).unwrap()), int(1));
        let s = build_one_qubit(&OneQubitSpec { n: 3, weight: 5, phase_steps: 3 }).unwrap();
        assert_eq!(born_probability(&s), ratio(5, 8));
    }

    #[test]
    fn text_forms() {
        let s = bs("11100010");
        assert_eq!(s.to_string(), "11100010");
        assert_eq!(s.run_length_string(), "A3 N3 A1 N1");
        assert!("101".parse::<BitString>().is_err());
        assert!("1x".parse::<BitString>().is_err());
    }

    fn fig5a() -> TwoQubitState {
        build_two_qubit_form_a(3, FormA { w1: ratio(1, 2), w2: ratio(3, 4), w3: ratio(1, 4), phi1: 0, phi2: 0, phi3: 0 }).unwrap()
    }

    #[test]
    fn form_a_layout_example() {
        let st = fig5a();
        assert_eq!(st.s_a().to_string(), "11110000");
        assert_eq!(st.s_b().to_string(), "11101000");
        assert_eq!(joint_frequency(&st, (A, A)), ratio(3, 8));
        // gamma_1^2 = cos^2(t1/2) sin^2(t2/2)
        assert_eq!(joint_frequency(&st, (A, N)), ratio(1, 2) * ratio(1, 4));
        let total: Rational = [(A, A), (A, N), (N, A), (N, N)].iter().map(|&p| joint_frequency(&st, p)).sum();
        assert_eq!(total, int(1));
    }

    #[test]
    fn form_a_degenerate_theta1() {
        let st = build_two_qubit_form_a(3, FormA { w1: int(1), w2: ratio(3, 8), w3: ratio(1, 2), phi1: 0, phi2: 0, phi3: 0 }).unwrap();
        let one = build_one_qubit(&OneQubitSpec { n: 3, weight: 3, phase_steps: 0 }).unwrap();
        assert_eq!(st.s_b(), &one);
    }

    #[test]
    fn form_a_rejects_unrepresentable() {
        let err = build_two_qubit_form_a(3, FormA { w1: ratio(1, 2), w2: ratio(1, 8), w3: int(0), phi1: 0, phi2: 0, phi3: 0 });
        assert!(matches!(err, Err(BitsError::NotRepresentable { .. })));
        let err = build_two_qubit_form_a(3, FormA { w1: ratio(1, 3), w2: int(0), w3: int(0), phi1: 0, phi2: 0, phi3: 0 });
        assert!(matches!(err, Err(BitsError::NotRepresentable { .. })));
    }

    #[test]
    fn joint_rotation_keeps_frequencies() {
        let base = fig5a();
        for phi1 in 0..8 {
            let st = build_two_qubit_form_a(3, FormA { w1: ratio(1, 2), w2: ratio(3, 4), w3: ratio(1, 4), phi1, phi2: 0, phi3: 0 }).unwrap();
            for p in [(A, A), (A, N), (N, A), (N, N)] {
                assert_eq!(joint_frequency(&st, p), joint_frequency(&base, p));
            }
        }
    }

    #[test]
    fn bell_conversion() {
        // theta1 = pi/2, theta3 = pi - theta2, cos^2(theta2/2) = 3/4
        let st = build_two_qubit_form_a(4, FormA { w1: ratio(1, 2), w2: ratio(3, 4), w3: ratio(1, 4), phi1: 0, phi2: 0, phi3: 0 }).unwrap();
        let b = convert_form_a_to_b(&st).unwrap();
        let TwoQubitLayout::B(fb) = b.layout() else { panic!() };
        assert_eq!(fb.w6, ratio(1, 2));
        assert_eq!(fb.w4, ratio(3, 4));
        assert_eq!(fb.w5, int(1) - &fb.w4);
        for p in [(A, A), (A, N), (N, A), (N, N)] {
            assert_eq!(joint_frequency(&st, p), joint_frequency(&b, p));
        }
        assert!(matches!(convert_form_a_to_b(&b), Err(BitsError::WrongLayout('A'))));
    }

    #[test]
    fn conversion_degenerate_and_unrepresentable() {
        let st = build_two_qubit_form_a(3, FormA { w1: int(1), w2: ratio(5, 8), w3: ratio(1, 2), phi1: 0, phi2: 0, phi3: 0 }).unwrap();
        let b = convert_form_a_to_b(&st).unwrap();
        for p in [(A, A), (A, N), (N, A), (N, N)] {
            assert_eq!(joint_frequency(&st, p), joint_frequency(&b, p));
        }
        // w6 = 1/2*1/4 + 1/2*1/2 = 3/8, w4 = (1/8)/(3/8) = 1/3: no dyadic form B
        let st = build_two_qubit_form_a(3, FormA { w1: ratio(1, 2), w2: ratio(1, 4), w3: ratio(1, 2), phi1: 0, phi2: 0, phi3: 0 }).unwrap();
        assert!(matches!(convert_form_a_to_b(&st), Err(BitsError::NotRepresentable { .. })));
    }

    #[test]
    fn correlation_examples() {
        // Bell layout with cos^2(t2/2) = 3/4: C = 2*3/4 - 1 = cos t2 = 1/2
        let st = build_two_qubit_form_a(3, FormA { w1: ratio(1, 2), w2: ratio(3, 4), w3: ratio(1, 4), phi1: 0, phi2: 0, phi3: 0 }).unwrap();
        assert_eq!(correlation(&st), ratio(1, 2));
        assert_eq!(correlation(&st.complement_b()), ratio(-1, 2));
        let aligned = build_two_qubit_form_a(3, FormA { w1: ratio(1, 2), w2: int(1), w3: int(0), phi1: 0, phi2: 0, phi3: 0 }).unwrap();
        assert_eq!(correlation(&aligned), int(1));
        // product state: w2 = w3 so S_b is independent of S_a
        let pa = ratio(3, 4);
        let pb = ratio(1, 4);
        let prod = build_two_qubit_form_a(4, FormA { w1: pa.clone(), w2: pb.clone(), w3: pb.clone(), phi1: 0, phi2: 0, phi3: 0 }).unwrap();
        let two = int(2);
        assert_eq!(correlation(&prod), (&two * &pa - int(1)) * (&two * &pb - int(1)));
    }

    #[test]
    fn pauli_actions() {
        let s = bs("11010010");
        let sigma1 = pauli_string(1, &s).unwrap();
        assert_eq!(sigma1, bs("00101101"));
        assert_eq!(pauli_string(1, &sigma1).unwrap(), s);
        // sigma_3 on all-A: second half complemented
        let all = BitString::uniform(3, A).unwrap();
        assert_eq!(pauli_string(3, &all).unwrap(), bs("11110000"));
        // sigma_2: zeta^{2^{N-3}}(not second half) || zeta^{2^{N-3}}(first half)
        // N = 3: q = 1; h1 = 1101, h2 = 0010 -> not h2 = 1101 -> 1110; h1 -> 1110
        assert_eq!(pauli_string(2, &s).unwrap(), bs("11101110"));
        assert!(matches!(pauli_string(2, &bs("1001")), Err(BitsError::TooShort { .. })));
        assert!(matches!(pauli_string(4, &s), Err(BitsError::BadAxis(4))));
        let pair = SpinorPair::new(s.clone(), all.clone()).unwrap();
        let out = pauli_apply(1, &pair).unwrap();
        assert_eq!(out.s_a, sigma1);
        let g = gamma_apply(3, &pair).unwrap();
        assert_eq!(g.s_a, bs("11110000"));
        assert_eq!(g.s_b, pauli_string(3, &s).unwrap().complement());
        assert!(SpinorPair::new(s, bs("10")).is_err());
    }

    #[test]
    fn one_qubit_injective() {
        for n in 1..=5u32 {
            let len = 1u64 << n;
            let mut seen = std::collections::HashSet::new();
            for weight in 1..len {
                for phase_steps in 0..len {
                    let spec = OneQubitSpec { n, weight, phase_steps };
                    let s = build_one_qubit(&spec).unwrap();
                    assert_eq!(decode_one_qubit(&s), Some(spec));
                    assert!(seen.insert(s));
                }
            }
        }
    }

    fn form_a_strategy() -> impl Strategy<Value = (u32, FormA)> {
        (2u32..=6).prop_flat_map(|n| {
            let len = 1i64 << n;
            (Just(n), 0..=len).prop_flat_map(move |(n, k1)| {
                let first = k1;
                let second = len - k1;
                (Just(n), Just(k1), 0..=first, 0..=second, 0..len, -len..len, -len..len)
            })
        })
        .prop_filter_map("dyadic block weights", |(n, k1, c2, c3, p1, p2, p3)| {
            let len = 1i64 << n;
            let w1 = ratio(k1, len);
            let w2 = if k1 == 0 { int(1) } else { ratio(c2, k1) };
            let w3 = if k1 == len { int(1) } else { ratio(c3, len - k1) };
            let ok = [&w1, &w2, &w3].iter().all(|w| is_dyadic_within(w, n));
            ok.then_some((n, FormA { w1, w2, w3, phi1: p1, phi2: p2, phi3: p3 }))
        })
    }

    proptest! {
        #[test]
        fn zeta_is_cyclic_group(n in 1u32..8, j in -300i64..300, k in -300i64..300, seed in any::<u64>()) {
            let len = 1usize << n;
            let symbols = (0..len).map(|i| if (seed >> (i % 64)) & 1 == 1 { A } else { N }).collect();
            let s = BitString::new(n, symbols).unwrap();
            prop_assert_eq!(zeta(&zeta(&s, j), k), zeta(&s, (j + k).rem_euclid(len as i64)));
            prop_assert_eq!(zeta(&s, len as i64), s.clone());
            prop_assert_eq!(born_probability(&zeta(&s, j)), born_probability(&s));
        }

        #[test]
        fn two_qubit_invariants((n, form) in form_a_strategy()) {
            let st = build_two_qubit_form_a(n, form.clone()).unwrap();
            let pairs = [(A, A), (A, N), (N, A), (N, N)];
            let total: Rational = pairs.iter().map(|&p| joint_frequency(&st, p)).sum();
            prop_assert_eq!(total, int(1));
            // phases never move joint frequencies
            let flat = build_two_qubit_form_a(n, FormA { phi1: 0, phi2: 0, phi3: 0, ..form }).unwrap();
            for p in pairs {
                prop_assert_eq!(joint_frequency(&st, p), joint_frequency(&flat, p));
            }
            if let Ok(b) = convert_form_a_to_b(&st) {
                for p in pairs {
                    prop_assert_eq!(joint_frequency(&st, p), joint_frequency(&b, p));
                }
            }
        }
    }
}
