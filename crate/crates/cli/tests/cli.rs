use std::process::Command;

use invset::exactnum::{parse_rational, QuadExtElement};
use invset::hilbertbits::BitString;
use invset_cli::{run, Outcome};
use serde_json::Value;

fn invoke(args: &[&str]) -> Outcome {
    run(std::iter::once("invset").chain(args.iter().copied()), None)
}

fn records(out: &Outcome) -> Vec<Value> {
    out.stdout.lines().map(|l| serde_json::from_str(l).expect("one JSON object per line")).collect()
}

fn exact<'a>(rec: &'a Value, key: &str) -> &'a str {
    rec["results"][key]["exact"].as_str().unwrap_or_else(|| panic!("no result {key} in {rec}"))
}

fn flags(rec: &Value) -> Vec<&str> {
    rec["flags"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect()
}

#[test]
fn chsh_golden_record() {
    let out = invoke(&["chsh", "run", "--cos", "45/64", "--N", "7", "--signs", "++-"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(
        out.stdout,
        concat!(
            r#"{"command":"chsh run","parameters":{"N":"7","cos00":"45/64","cos01":"45/64","cos10":"45/64","cos11":"45/64","signs":"+++-"},"#,
            r#""results":{"c00":{"exact":"45/64","decimal":"0.703125000000000000000000000000"},"#,
            r#""c01":{"exact":"45/64","decimal":"0.703125000000000000000000000000"},"#,
            r#""c10":{"exact":"45/64","decimal":"0.703125000000000000000000000000"},"#,
            r#""c11":{"exact":"-45/64","decimal":"-0.703125000000000000000000000000"},"#,
            r#""s":{"exact":"45/16","decimal":"2.812500000000000000000000000000"}},"#,
            r#""flags":["BELL_VIOLATED","WITHIN_TSIRELSON"],"seed":null,"version":"0.1.0"}"#,
            "\n"
        )
    );
}

#[test]
fn chsh_too_shallow_is_a_usage_error() {
    // 2^6 (1 + 45/64) / 2 is not an integer
    let out = invoke(&["chsh", "run", "--cos", "45/64", "--N", "6", "--signs", "++-"]);
    assert_eq!(out.code, 1, "{}", out.stdout);
    assert!(out.stderr.contains("not representable"));
}

#[test]
fn niven_third_of_pi() {
    let out = invoke(&["niven", "classify", "--phi", "1/3pi"]);
    assert_eq!(out.code, 0);
    let r = &records(&out)[0];
    assert_eq!(exact(r, "cos_phi"), "1/2");
    assert_eq!(exact(r, "phi_over_pi"), "1/3");
}

#[test]
fn niven_irrational_cosine() {
    let out = invoke(&["niven", "classify", "--phi", "1/5pi"]);
    let r = &records(&out)[0];
    assert_eq!(exact(r, "cos_phi"), "1/4+1/4*sqrt(5)");
}

#[test]
fn mach_zehnder_inconsistent_history() {
    let out = invoke(&["mz", "run", "--mode", "momentum", "--phi", "3/8pi"]);
    assert_eq!(out.code, 2);
    assert!(flags(&records(&out)[0]).contains(&"INCONSISTENT_HISTORY"));
    assert!(out.stderr.contains("inconsistent history"));
}

#[test]
fn mach_zehnder_position() {
    let out = invoke(&["mz", "run", "--mode", "position", "--phi", "3/8pi", "--N", "4"]);
    assert_eq!(out.code, 0);
    let r = &records(&out)[0];
    assert_eq!(exact(r, "p_a"), "1/2");
    assert_eq!(exact(r, "string"), "0001111111100000");
}

#[test]
fn padic_distance_seven_three() {
    let r = &records(&invoke(&["padic", "dist", "--a", "7", "--b", "3"]))[0];
    assert_eq!(exact(r, "padic_distance"), "1/4");
    let r = &records(&invoke(&["padic", "dist", "--p", "3", "--a", "1/9", "--b", "0"]))[0];
    assert_eq!(exact(r, "padic_distance"), "9");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["bogus"][..],
        &["niven", "classify", "--phi", "one third"],
        &["padic", "dist", "--p", "4", "--a", "1", "--b", "2"],
        &["chsh", "run", "--cos", "45/64", "--N", "7", "--signs", "+*-"],
        &["--seed", "xyz", "selftest"],
    ] {
        let out = invoke(args);
        assert_eq!(out.code, 1, "{args:?}: {}", out.stdout);
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn seeded_commands_are_deterministic() {
    let args = ["--seed", "2a", "dynamics", "ruban", "--samples", "2000"];
    let (a, b) = (invoke(&args), invoke(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(records(&a)[0]["seed"], "000000000000002a");
    let c = invoke(&["--seed", "2b", "dynamics", "ruban", "--samples", "2000"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_from_environment_and_flag_precedence() {
    let args = ["invset", "dynamics", "dirac", "--N", "3"];
    let env = run(args, Some("0x10".into()));
    assert_eq!(records(&env)[0]["seed"], "0000000000000010");
    let flag = run(["invset", "--seed", "11", "dynamics", "dirac", "--N", "3"], Some("10".into()));
    assert_eq!(records(&flag)[0]["seed"], "0000000000000011");
    let default = run(args, None);
    assert_eq!(records(&default)[0]["seed"], "0000000000000000");
}

#[test]
fn out_file_receives_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    let out = invoke(&["--out", path.to_str().unwrap(), "niven", "classify", "--phi", "1/2pi"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, invoke(&["niven", "classify", "--phi", "1/2pi"]).stdout);
}

#[test]
fn csv_output() {
    let out = invoke(&["--format", "csv", "padic", "dist", "--a", "7", "--b", "3"]);
    let mut rows = csv::Reader::from_reader(out.stdout.as_bytes());
    assert_eq!(
        rows.headers().unwrap().iter().collect::<Vec<_>>(),
        ["record", "command", "seed", "version", "kind", "key", "exact", "decimal"]
    );
    let dist = rows.records().map(Result::unwrap).find(|r| &r[5] == "padic_distance").unwrap();
    assert_eq!(&dist[6], "1/4");
    assert_eq!(&dist[7], "0.250000000000000000000000000000");
}

fn assert_round_trips(rec: &Value) {
    for (key, v) in rec["results"].as_object().unwrap() {
        let s = v["exact"].as_str().unwrap();
        let ok = parse_rational(s).is_ok()
            || s.parse::<QuadExtElement>().is_ok()
            || s.parse::<BitString>().is_ok()
            || s.strip_suffix("*pi").is_some_and(|c| parse_rational(c).is_ok());
        assert!(ok, "{key} = {s:?} does not parse");
    }
}

#[test]
fn exact_strings_round_trip() {
    let commands: [&[&str]; 9] = [
        &["padic", "embed", "--x", "5", "--depth", "4"],
        &["niven", "classify", "--phi", "1/4pi"],
        &["qubit", "build", "--N", "3", "--fraction", "3/8", "--phase", "1"],
        &["qubit", "correlate", "--N", "3", "--w1", "1/2", "--w2", "1/4", "--w3", "3/4", "--phases", "0,1,0"],
        &["chsh", "scan-tsirelson", "--resolution", "8", "--trials", "100"],
        &["pbr", "eval", "--theta", "1/2pi", "--alpha", "1/2pi", "--beta", "1/4pi"],
        &["pbr", "eval", "--theta", "1/3pi", "--alpha", "1/7pi", "--beta", "1/5pi"],
        &["dynamics", "dirac", "--N", "3", "--energy", "3/2"],
        &["dynamics", "ruban", "--samples", "1000"],
    ];
    for args in commands {
        let out = invoke(args);
        assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
        records(&out).iter().for_each(assert_round_trips);
    }
    let r = &records(&invoke(&["pbr", "eval", "--theta", "1/2pi", "--alpha", "1/2pi", "--beta", "1/4pi"]))[0];
    assert_eq!(exact(r, "x"), "1");
    assert_eq!(exact(r, "z").parse::<QuadExtElement>().unwrap().to_string(), exact(r, "z"));
}

#[test]
fn pbr_exception_is_flagged() {
    let r = &records(&invoke(&["pbr", "eval", "--cos-a2b", "3/4", "--cos-b", "1/8", "--N", "8"]))[0];
    let f = flags(r);
    assert!(f.contains(&"SIMULTANEOUSLY_DESCRIBABLE") && f.contains(&"NON_GENERIC"), "{f:?}");
}

#[test]
fn binary_selftest_exit_code_and_bytes() {
    let bin = env!("CARGO_BIN_EXE_invset");
    let go = || Command::new(bin).args(["--seed", "7", "selftest"]).output().unwrap();
    let (a, b) = (go(), go());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 14);
    assert!(text.lines().all(|l| l.contains(r#""flags":["PASS"]"#)));
}

#[test]
fn chsh_wrong_sample_space_is_refused() {
    let base = ["chsh", "run", "--cos", "45/64", "--N", "7", "--signs", "++-"];
    let ok = invoke(&[&base[..], &["--pairing", "00", "--tag", "0"]].concat());
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert_eq!(exact(&records(&ok)[0], "c00"), "45/64");
    let out = invoke(&[&base[..], &["--pairing", "01", "--tag", "0"]].concat());
    assert_eq!(out.code, 2, "{}", out.stderr);
    assert!(flags(&records(&out)[0]).contains(&"WRONG_SAMPLE_SPACE"));
}
