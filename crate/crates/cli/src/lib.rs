//! Command-line front end for `invset`.
//!
//! Every command writes one JSON record per line (or CSV rows). Exit codes:
//! `0` success, `1` usage or input error, `2` the model refuses the
//! configuration, `3` an internal invariant failed.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use invset::dynamics::{dirac_evolve, energy_frequency, random_pair, ruban_frequency_test, DiracState};
use invset::exactnum::{int, parse_rational, Fixed, QuadExtElement, Rational};
use invset::experiments::{
    chsh_configs, chsh_correlation, chsh_statistic, mach_zehnder, parse_signs, pbr_describability_from_cosines,
    pbr_describability_report, pbr_probabilities, tsirelson_scan, ChshConfig, ExperimentError, MzConfig, MzMode, PbrAngles,
    PbrDescribability, PbrValue,
};
use invset::hilbertbits::{
    build_one_qubit, build_two_qubit_form_a, convert_form_a_to_b, correlation, joint_frequency, BitString, FormA,
    OneQubitSpec, Symbol, TwoQubitLayout, TwoQubitState,
};
use invset::numbertheory::{classify_angle, cos_quadratic, AngleKind, AngleSpec, PiRational};
use invset::padic::{cantor_embed, cantor_preimage, ord_p, padic_dist, PAdicInt, Prime, Valuation, DEFAULT_DEPTH};
use num_traits::Signed;

pub mod record;
pub mod selftest;

use record::{render, Format, RunRecord};

pub const SEED_ENV: &str = "INVSET_SEED";

#[derive(Debug, Parser)]
#[command(name = "invset", version, about = "Exact finite models of quantum experiments on bit strings")]
pub struct Cli {
    /// Seed as hex (`2a`, `0x2a`); falls back to INVSET_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true, value_enum, default_value = "records")]
    format: Format,
    /// Write records here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// p-adic distances and the Cantor-set embedding.
    #[command(subcommand)]
    Padic(PadicCmd),
    /// Rationality of cos(phi) and phi/pi.
    #[command(subcommand)]
    Niven(NivenCmd),
    /// One- and two-qubit bit strings.
    #[command(subcommand)]
    Qubit(QubitCmd),
    /// Mach-Zehnder interferometer.
    #[command(subcommand)]
    Mz(MzCmd),
    /// CHSH with one sample space per parity.
    #[command(subcommand)]
    Chsh(ChshCmd),
    /// PBR outcome probabilities.
    #[command(subcommand)]
    Pbr(PbrCmd),
    /// Shift-map statistics and Dirac evolution.
    #[command(subcommand)]
    Dynamics(DynamicsCmd),
    /// Run the embedded invariant suite.
    Selftest,
}

#[derive(Debug, Subcommand)]
enum PadicCmd {
    Dist {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    Embed(EmbedArgs),
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Integer to expand (negative values use p-adic complements).
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["digits", "point"])]
    x: Option<String>,
    /// Comma-separated digits, least significant first.
    #[arg(long, conflicts_with = "point")]
    digits: Option<String>,
    /// Test whether a rational lies on the Cantor set instead.
    #[arg(long)]
    point: Option<String>,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
}

#[derive(Debug, Subcommand)]
enum NivenCmd {
    Classify {
        /// `m/n pi` or `cos=p/q`.
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
    },
}

#[derive(Debug, Subcommand)]
enum QubitCmd {
    Build {
        #[arg(long = "N")]
        n: u32,
        /// Number of `1`s in the string
        #[arg(long, required_unless_present = "fraction", conflicts_with = "fraction")]
        weight: Option<u64>,
        /// `cos^2(theta/2)` as an exact dyadic, instead of `--weight`
        #[arg(long)]
        fraction: Option<String>,
        #[arg(long, default_value_t = 0)]
        phase: u64,
    },
    Correlate(CorrelateArgs),
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long)]
    w1: String,
    #[arg(long)]
    w2: String,
    #[arg(long)]
    w3: String,
    /// Phase steps `phi1,phi2,phi3`.
    #[arg(long, default_value = "0,0,0", allow_hyphen_values = true)]
    phases: String,
    /// Complement `S_b` before counting.
    #[arg(long)]
    complement_b: bool,
}

#[derive(Debug, Subcommand)]
enum MzCmd {
    Run {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long = "N", default_value_t = 8)]
        n: u32,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Momentum,
    Position,
}

#[derive(Debug, Subcommand)]
enum ChshCmd {
    Run(ChshArgs),
    ScanTsirelson {
        #[arg(long, default_value_t = 64)]
        resolution: u32,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

#[derive(Debug, Args)]
struct ChshArgs {
    #[arg(long = "N", default_value_t = 7)]
    n: u32,
    /// Cosine magnitude used for every pairing not given separately.
    #[arg(long, allow_hyphen_values = true)]
    cos: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    cos00: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    cos01: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    cos10: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    cos11: Option<String>,
    /// Signs for (0,0),(0,1),(1,0),(1,1); three characters imply a leading `+`.
    #[arg(long, default_value = "++-", allow_hyphen_values = true)]
    signs: String,
    /// Count a single pairing `xy` in the sample space `--tag`.
    #[arg(long, requires = "tag")]
    pairing: Option<String>,
    #[arg(long, requires = "pairing")]
    tag: Option<u8>,
}

#[derive(Debug, Subcommand)]
enum PbrCmd {
    Eval(PbrArgs),
}

#[derive(Debug, Args)]
struct PbrArgs {
    #[arg(long, allow_hyphen_values = true, requires_all = ["alpha", "beta"])]
    theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Exact cos(alpha - 2 beta), instead of angles.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "theta", requires = "cos_b")]
    cos_a2b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    cos_b: Option<String>,
    #[arg(long = "N", default_value_t = 16)]
    n: u32,
}

#[derive(Debug, Subcommand)]
enum DynamicsCmd {
    Ruban {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    Dirac {
        #[arg(long = "N", default_value_t = 4)]
        n: u32,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        rate: i64,
        /// Defaults to one full period at rate 1.
        #[arg(long)]
        ticks: Option<i64>,
        /// Mass-energy in units with hbar = 1.
        #[arg(long)]
        energy: Option<String>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Refused(Vec<RunRecord>, String),
    Invariant(Vec<RunRecord>, String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Refused(..) => 2,
            Failure::Invariant(..) => 3,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn parse_seed(s: &str) -> Result<u64, Failure> {
    let t = s.trim();
    let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u64::from_str_radix(t, 16).map_err(|_| Failure::Usage(format!("seed `{s}` is not a hex u64")))
}

pub fn format_seed(seed: u64) -> String {
    format!("{seed:016x}")
}

/// Parses `args` (including the program name) and runs the command.
/// `env_seed` is the value of [`SEED_ENV`], if set.
pub fn run<I, T>(args: I, env_seed: Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let format = cli.format;
    let out = cli.out.clone();
    let (code, records, message) = match execute(cli, env_seed) {
        Ok(records) => (0, records, None),
        Err(f) => {
            let code = f.code();
            match f {
                Failure::Usage(m) => (code, Vec::new(), Some(m)),
                Failure::Refused(r, m) | Failure::Invariant(r, m) => (code, r, Some(m)),
            }
        }
    };
    let text = render(&records, format);
    let mut stderr = message.map(|m| format!("invset: {m}\n")).unwrap_or_default();
    let stdout = match out {
        Some(path) => match std::fs::write(&path, &text) {
            Ok(()) => String::new(),
            Err(e) => {
                stderr.push_str(&format!("invset: cannot write {}: {e}\n", path.display()));
                return Outcome { code: 1, stdout: String::new(), stderr };
            }
        },
        None => text,
    };
    Outcome { code, stdout, stderr }
}

fn execute(cli: Cli, env_seed: Option<String>) -> Result<Vec<RunRecord>, Failure> {
    let seed = match cli.seed.as_deref().or(env_seed.as_deref()) {
        Some(s) => parse_seed(s)?,
        None => 0,
    };
    match cli.command {
        Command::Padic(cmd) => padic(cmd),
        Command::Niven(NivenCmd::Classify { phi }) => niven(&phi),
        Command::Qubit(QubitCmd::Build { n, weight, fraction, phase }) => qubit_build(n, weight, fraction, phase),
        Command::Qubit(QubitCmd::Correlate(args)) => qubit_correlate(args),
        Command::Mz(MzCmd::Run { mode, phi, n }) => mz(mode, &phi, n),
        Command::Chsh(ChshCmd::Run(args)) => chsh(args),
        Command::Chsh(ChshCmd::ScanTsirelson { resolution, trials }) => tsirelson(resolution, trials, seed),
        Command::Pbr(PbrCmd::Eval(args)) => pbr(args),
        Command::Dynamics(DynamicsCmd::Ruban { p, depth, samples }) => ruban(p, depth, samples, seed),
        Command::Dynamics(DynamicsCmd::Dirac { n, rate, ticks, energy }) => dirac(n, rate, ticks, energy, seed),
        Command::Selftest => selftest::run(seed),
    }
}

fn rational(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(usage)
}

fn prime(p: u32) -> Result<Prime, Failure> {
    Prime::new(p).map_err(usage)
}

fn valuation_result(rec: &mut RunRecord, key: &str, v: Valuation) {
    match v {
        Valuation::Finite(k) => {
            rec.rational(key, &int(k));
        }
        Valuation::Infinite => {
            rec.flag("INFINITE_VALUATION");
        }
    }
}

fn padic(cmd: PadicCmd) -> Result<Vec<RunRecord>, Failure> {
    match cmd {
        PadicCmd::Dist { p, a, b } => {
            let pr = prime(p)?;
            let (ra, rb) = (rational(&a)?, rational(&b)?);
            let mut rec = RunRecord::new("padic dist");
            rec.param("p", p).param("a", &ra).param("b", &rb);
            rec.rational("padic_distance", &padic_dist(&ra, &rb, pr));
            rec.rational("euclidean_distance", &(&ra - &rb).abs());
            valuation_result(&mut rec, "ord_p_difference", ord_p(&(&ra - &rb), pr));
            Ok(vec![rec])
        }
        PadicCmd::Embed(args) => {
            let pr = prime(args.p)?;
            let mut rec = RunRecord::new("padic embed");
            rec.param("p", args.p).param("depth", args.depth);
            if let Some(point) = &args.point {
                let v = rational(point)?;
                rec.param("point", &v);
                match cantor_preimage(&v, pr, args.depth) {
                    Some(z) => {
                        rec.rational("preimage", &Rational::from_integer(z.value()));
                        rec.flag("ON_CANTOR_SET");
                    }
                    None => {
                        rec.flag("OFF_CANTOR_SET");
                    }
                }
                return Ok(vec![rec]);
            }
            let z = match (&args.x, &args.digits) {
                (Some(x), _) => {
                    let v = rational(x)?;
                    if !v.is_integer() {
                        return Err(usage(format!("--x {v} is not an integer")));
                    }
                    rec.param("x", &v);
                    PAdicInt::from_integer(&v.to_integer(), pr, args.depth)
                }
                (None, Some(d)) => {
                    let digits = d
                        .split(',')
                        .map(|t| t.trim().parse::<u32>().map_err(|_| usage(format!("bad digit `{t}`"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    rec.param("digits", d);
                    PAdicInt::new(pr, digits).map_err(usage)?
                }
                (None, None) => return Err(usage("padic embed needs --x, --digits or --point")),
            };
            let point = cantor_embed(&z);
            rec.rational("value_mod_p_depth", &Rational::from_integer(z.value()));
            rec.rational("embedded", &point.value);
            rec.flag("ON_CANTOR_SET");
            Ok(vec![rec])
        }
    }
}

fn angle_kind_flag(kind: AngleKind) -> &'static str {
    match kind {
        AngleKind::PositionConsistent => "POSITION_CONSISTENT",
        AngleKind::MomentumConsistent => "MOMENTUM_CONSISTENT",
        AngleKind::Exceptional => "EXCEPTIONAL",
        AngleKind::Neither => "NEITHER",
    }
}

fn niven(phi: &str) -> Result<Vec<RunRecord>, Failure> {
    let spec: AngleSpec = phi.parse().map_err(usage)?;
    let d = classify_angle(&spec).map_err(usage)?;
    let mut rec = RunRecord::new("niven classify");
    rec.param("phi", phi.trim());
    rec.flag(angle_kind_flag(d.kind));
    match &d.phi_over_pi {
        Some(a) => {
            rec.rational("phi_over_pi", a);
        }
        None => {
            rec.flag("PHI_OVER_PI_IRRATIONAL");
        }
    }
    match (&d.cos_phi, &spec) {
        (Some(c), _) => {
            rec.rational("cos_phi", c);
        }
        (None, AngleSpec::Pi(a)) => {
            rec.flag("COS_IRRATIONAL");
            if let Some(q) = cos_quadratic(a) {
                rec.quad("cos_phi", &q);
            }
        }
        (None, AngleSpec::Cos(_)) => unreachable!("cosine input is always known"),
    }
    Ok(vec![rec])
}

fn qubit_build(n: u32, weight: Option<u64>, fraction: Option<String>, phase: u64) -> Result<Vec<RunRecord>, Failure> {
    let weight = match (weight, fraction) {
        (Some(w), _) => w,
        (None, Some(f)) => {
            let count = rational(&f)? * Rational::from_integer(1u64.checked_shl(n).unwrap_or(0).into());
            if !count.is_integer() || count.is_negative() {
                return Err(usage(format!("{f} is not a multiple of 2^-{n} in [0, 1]")));
            }
            count.to_integer().try_into().map_err(usage)?
        }
        (None, None) => return Err(usage("one of --weight or --fraction is required")),
    };
    let s = build_one_qubit(&OneQubitSpec { n, weight, phase_steps: phase }).map_err(usage)?;
    let mut rec = RunRecord::new("qubit build");
    rec.param("N", n).param("weight", weight).param("phase", phase);
    rec.rational("born_probability", &invset::hilbertbits::born_probability(&s));
    rec.rational("phi_over_pi", &OneQubitSpec { n, weight, phase_steps: phase }.phi_over_pi());
    rec.text("string", &s, s.run_length_string());
    Ok(vec![rec])
}

const PAIRS: [(&str, (Symbol, Symbol)); 4] = [
    ("p_ab", (Symbol::A, Symbol::A)),
    ("p_a_notb", (Symbol::A, Symbol::NotA)),
    ("p_nota_b", (Symbol::NotA, Symbol::A)),
    ("p_nota_notb", (Symbol::NotA, Symbol::NotA)),
];

fn frequencies(rec: &mut RunRecord, prefix: &str, st: &TwoQubitState) {
    for (k, pair) in PAIRS {
        rec.rational(&format!("{prefix}{k}"), &joint_frequency(st, pair));
    }
}

fn qubit_correlate(args: CorrelateArgs) -> Result<Vec<RunRecord>, Failure> {
    let phases = args
        .phases
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| usage(format!("bad phase `{t}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let [phi1, phi2, phi3] = phases[..] else {
        return Err(usage("--phases needs three integers"));
    };
    let form = FormA { w1: rational(&args.w1)?, w2: rational(&args.w2)?, w3: rational(&args.w3)?, phi1, phi2, phi3 };
    let mut rec = RunRecord::new("qubit correlate");
    rec.param("N", args.n).param("w1", &form.w1).param("w2", &form.w2).param("w3", &form.w3).param("phases", &args.phases);
    let mut st = build_two_qubit_form_a(args.n, form).map_err(usage)?;
    if args.complement_b {
        rec.param("complement_b", true);
        st = st.complement_b();
    }
    frequencies(&mut rec, "", &st);
    rec.rational("correlation", &correlation(&st));
    rec.text("s_a", st.s_a(), st.s_a().run_length_string());
    rec.text("s_b", st.s_b(), st.s_b().run_length_string());
    if args.complement_b {
        return Ok(vec![rec]);
    }
    match convert_form_a_to_b(&st) {
        Ok(b) => {
            let TwoQubitLayout::B(fb) = b.layout() else { unreachable!("conversion yields form B") };
            rec.rational("form_b_w4", &fb.w4).rational("form_b_w5", &fb.w5).rational("form_b_w6", &fb.w6);
            let same = PAIRS.iter().all(|&(_, p)| joint_frequency(&st, p) == joint_frequency(&b, p));
            if !same {
                rec.flag("FORM_MISMATCH");
                return Err(Failure::Invariant(vec![rec], "form A and form B frequencies differ".into()));
            }
            rec.flag("FORM_B_EQUIVALENT");
        }
        Err(_) => {
            rec.flag("FORM_B_UNREPRESENTABLE");
        }
    }
    Ok(vec![rec])
}

fn mz(mode: ModeArg, phi: &str, n: u32) -> Result<Vec<RunRecord>, Failure> {
    let spec: AngleSpec = phi.parse().map_err(usage)?;
    let angle = classify_angle(&spec).map_err(usage)?;
    let mode = match mode {
        ModeArg::Momentum => MzMode::Momentum,
        ModeArg::Position => MzMode::Position,
    };
    let mut rec = RunRecord::new("mz run");
    rec.param("mode", mode).param("phi", phi.trim()).param("N", n);
    rec.flag(angle_kind_flag(angle.kind));
    match mach_zehnder(&MzConfig { mode, angle, n }) {
        Ok(out) => {
            rec.rational("p_a", &out.p_a).rational("p_not_a", &out.p_not_a);
            rec.text("string", &out.string, out.string.run_length_string());
            rec.flag("CONSISTENT_HISTORY");
            Ok(vec![rec])
        }
        Err(e @ ExperimentError::InconsistentHistory { .. }) => {
            rec.flag("INCONSISTENT_HISTORY");
            Err(Failure::Refused(vec![rec], e.to_string()))
        }
        Err(e) => Err(usage(e)),
    }
}

fn chsh(args: ChshArgs) -> Result<Vec<RunRecord>, Failure> {
    let pick = |specific: &Option<String>| -> Result<Rational, Failure> {
        match specific.as_ref().or(args.cos.as_ref()) {
            Some(s) => rational(s),
            None => Err(usage("give --cos or all of --cos00 --cos01 --cos10 --cos11")),
        }
    };
    let cosines = [pick(&args.cos00)?, pick(&args.cos01)?, pick(&args.cos10)?, pick(&args.cos11)?];
    let signs = parse_signs(&args.signs).map_err(usage)?;
    let (z0, z1) = chsh_configs(args.n, cosines.clone(), signs).map_err(usage)?;
    let mut rec = RunRecord::new("chsh run");
    rec.param("N", args.n).param("signs", signs.iter().map(|s| s.symbol()).collect::<String>());
    for (k, c) in ["cos00", "cos01", "cos10", "cos11"].iter().zip(&cosines) {
        rec.param(k, c);
    }
    if let (Some(pairing), Some(tag)) = (&args.pairing, args.tag) {
        let xy: Vec<u8> = pairing.chars().filter_map(|c| c.to_digit(10)).map(|d| d as u8).collect();
        let [x, y] = xy[..] else {
            return Err(usage(format!("--pairing `{pairing}` must be two binary digits")));
        };
        rec.param("pairing", format!("{x}{y}")).param("tag", tag);
        let config: &ChshConfig = match tag {
            0 => &z0,
            1 => &z1,
            _ => return Err(usage("--tag must be 0 or 1")),
        };
        return match chsh_correlation(config, (x, y)) {
            Ok(c) => {
                rec.rational(&format!("c{x}{y}"), &c);
                Ok(vec![rec])
            }
            Err(e @ ExperimentError::WrongSampleSpace { .. }) => {
                rec.flag("WRONG_SAMPLE_SPACE");
                Err(Failure::Refused(vec![rec], e.to_string()))
            }
            Err(e) => Err(usage(e)),
        };
    }
    let report = chsh_statistic(&z0, &z1).map_err(usage)?;
    for (k, c) in ["c00", "c01", "c10", "c11"].iter().zip(&report.correlations) {
        rec.rational(k, c);
    }
    rec.rational("s", &report.s);
    rec.flag(if report.violated { "BELL_VIOLATED" } else { "CLASSICAL_BOUND_RESPECTED" });
    if &report.s * &report.s <= int(8) {
        rec.flag("WITHIN_TSIRELSON");
    } else {
        rec.flag("ABOVE_TSIRELSON");
    }
    Ok(vec![rec])
}

fn tsirelson(resolution: u32, trials: u64, seed: u64) -> Result<Vec<RunRecord>, Failure> {
    let report = tsirelson_scan(resolution, trials, seed).map_err(usage)?;
    let bound = 2.0 * std::f64::consts::SQRT_2;
    let mut rec = RunRecord::new("chsh scan-tsirelson");
    rec.seed = Some(format_seed(seed));
    rec.param("resolution", resolution).param("trials", trials);
    rec.float("max_s", report.max_s);
    rec.quad("tsirelson_bound", &QuadExtElement::new(int(0), int(2), 2u32.into()));
    rec.float("gap", bound - report.max_s);
    if report.max_s <= bound + 1e-9 {
        rec.flag("WITHIN_TSIRELSON");
        Ok(vec![rec])
    } else {
        rec.flag("ABOVE_TSIRELSON");
        Err(Failure::Invariant(vec![rec], "scan exceeded 2*sqrt(2)".into()))
    }
}

fn pbr_value(rec: &mut RunRecord, key: &str, v: &PbrValue) {
    match &v.exact {
        Some(q) => {
            rec.quad(key, q);
            rec.flag(&format!("{}_EXACT", key.to_uppercase()));
        }
        None => {
            rec.text(key, &v.approx, &v.decimal);
            rec.flag(&format!("{}_APPROXIMATE", key.to_uppercase()));
        }
    }
}

fn describability(rec: &mut RunRecord, r: &PbrDescribability) {
    for (i, w) in r.cos_ab.iter().enumerate() {
        rec.quad(&format!("cos_alpha_minus_beta_{i}"), w);
    }
    rec.flag(if r.x_describable { "X_DESCRIBABLE" } else { "X_NOT_DESCRIBABLE" });
    rec.flag(if r.z_describable { "Z_DESCRIBABLE" } else { "Z_NOT_DESCRIBABLE" });
    rec.flag(if r.simultaneous { "SIMULTANEOUSLY_DESCRIBABLE" } else { "NOT_SIMULTANEOUSLY_DESCRIBABLE" });
    if r.degenerate {
        rec.flag("DEGENERATE");
    } else if !r.generic {
        rec.flag("NON_GENERIC");
    }
}

fn pbr(args: PbrArgs) -> Result<Vec<RunRecord>, Failure> {
    let mut rec = RunRecord::new("pbr eval");
    rec.param("N", args.n);
    if let (Some(u), Some(v)) = (&args.cos_a2b, &args.cos_b) {
        let (u, v) = (rational(u)?, rational(v)?);
        rec.param("cos_alpha_minus_2beta", &u).param("cos_beta", &v);
        let r = pbr_describability_from_cosines(&u, &v, args.n).map_err(usage)?;
        describability(&mut rec, &r);
        return Ok(vec![rec]);
    }
    let angle = |s: &Option<String>, name: &str| -> Result<PiRational, Failure> {
        s.as_deref().ok_or_else(|| usage(format!("missing --{name}")))?.parse().map_err(usage)
    };
    let angles = PbrAngles { theta: angle(&args.theta, "theta")?, alpha: angle(&args.alpha, "alpha")?, beta: angle(&args.beta, "beta")? };
    rec.param("theta", angles.theta).param("alpha", angles.alpha).param("beta", angles.beta);
    let p = pbr_probabilities(&angles);
    pbr_value(&mut rec, "x", &p.x);
    pbr_value(&mut rec, "z", &p.z);
    describability(&mut rec, &pbr_describability_report(&angles, args.n));
    Ok(vec![rec])
}

fn ruban(p: u32, depth: usize, samples: u64, seed: u64) -> Result<Vec<RunRecord>, Failure> {
    let r = ruban_frequency_test(prime(p)?, depth, samples, seed).map_err(usage)?;
    let mut rec = RunRecord::new("dynamics ruban");
    rec.seed = Some(format_seed(seed));
    rec.param("p", p).param("depth", depth).param("samples", samples);
    for (d, f) in r.frequencies.iter().enumerate() {
        rec.rational(&format!("freq_{d}"), f);
    }
    rec.float("max_deviation", r.max_deviation).float("sigma", r.sigma);
    rec.flag(if r.pass { "RUBAN_PASS" } else { "RUBAN_FAIL" });
    Ok(vec![rec])
}

fn dirac(n: u32, rate: i64, ticks: Option<i64>, energy: Option<String>, seed: u64) -> Result<Vec<RunRecord>, Failure> {
    let start = DiracState::new(random_pair(n, seed).map_err(usage)?, rate);
    let ticks = ticks.unwrap_or(1i64 << n);
    if ticks < 0 {
        return Err(usage("--ticks must be non-negative"));
    }
    let mut rec = RunRecord::new("dynamics dirac");
    rec.seed = Some(format_seed(seed));
    rec.param("N", n).param("rate", rate).param("ticks", ticks);
    let counts = |s: &BitString| s.count(Symbol::A);
    let (ca, cb) = (counts(&start.pair.s_a), counts(&start.pair.s_b));
    let mut st = start.clone();
    for _ in 0..ticks {
        st = dirac_evolve(&st, 1);
        if counts(&st.pair.s_a) != ca || counts(&st.pair.s_b) != cb {
            rec.flag("COUNTS_NOT_CONSERVED");
            return Err(Failure::Invariant(vec![rec], format!("symbol counts changed at tick {}", st.tick)));
        }
    }
    rec.rational("period", &int(start.period() as i64));
    rec.rational("final_tick", &int(st.tick));
    rec.text("s_a_initial", &start.pair.s_a, start.pair.s_a.run_length_string());
    rec.text("s_b_initial", &start.pair.s_b, start.pair.s_b.run_length_string());
    rec.text("s_a_final", &st.pair.s_a, st.pair.s_a.run_length_string());
    rec.text("s_b_final", &st.pair.s_b, st.pair.s_b.run_length_string());
    rec.flag("COUNTS_CONSERVED");
    if st.pair == start.pair {
        rec.flag("RETURNED_TO_START");
    }
    if let Some(e) = energy {
        let e = rational(&e)?;
        rec.param("energy", &e);
        let ef = energy_frequency(&e, n).map_err(usage)?;
        rec.rational("omega", &ef.omega);
        rec.rational("delta_t_pi_coeff", &ef.delta_t_pi_coeff);
        rec.rational("steps_per_unit_inv_pi_coeff", &ef.steps_per_unit_inv_pi_coeff);
        let pi = Fixed::pi(Fixed::DEFAULT_BITS);
        let dt = Fixed::from_rational(&ef.delta_t_pi_coeff, Fixed::DEFAULT_BITS).mul(&pi);
        rec.text("delta_t", format!("{}*pi", ef.delta_t_pi_coeff), dt.to_decimal(record::DECIMAL_DIGITS));
    }
    Ok(vec![rec])
}
