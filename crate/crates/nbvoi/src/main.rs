use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut err = io::stderr().lock();
    let mut code = nbvoi::cli::main_with_args(std::env::args_os(), &mut out, &mut err);
    if out.flush().is_err() && code == 0 {
        code = nbvoi::error::EXIT_OUTPUT;
    }
    ExitCode::from(code as u8)
}
