use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let profile = std::env::var(qlogic_cli::PROFILE_VAR).ok();
    let out = qlogic_cli::run(std::env::args_os(), profile.as_deref());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code)
}
