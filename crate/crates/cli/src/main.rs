use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env_seed = std::env::var(invset_cli::SEED_ENV).ok();
    let outcome = invset_cli::run(std::env::args_os(), env_seed);
    std::io::stdout().write_all(outcome.stdout.as_bytes()).expect("stdout");
    std::io::stderr().write_all(outcome.stderr.as_bytes()).expect("stderr");
    ExitCode::from(outcome.code as u8)
}
