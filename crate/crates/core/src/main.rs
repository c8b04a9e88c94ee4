use std::process::ExitCode;

use clap::Parser;
use qudecide::cli::{run, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("QUDECIDE_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    eprintln!("error: cannot size thread pool: {e}");
                    return ExitCode::from(EXIT_INPUT as u8);
                }
            }
            _ => {
                eprintln!("error: QUDECIDE_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = run(
        &cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
