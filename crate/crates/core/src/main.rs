use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = zefc::cli::run(std::env::args_os());
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = out.write_all(text.as_bytes());
    ExitCode::from(code as u8)
}
