use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(msg) = fisher_bench::configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = fisher_bench::run_cli(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
