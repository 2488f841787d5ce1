use std::io::Write;
use std::process::ExitCode;

use simplicial_resistance::cli;

fn main() -> ExitCode {
    let env_tol = std::env::var(cli::TOL_ENV).ok();
    let out = cli::run(std::env::args_os(), env_tol.as_deref());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
