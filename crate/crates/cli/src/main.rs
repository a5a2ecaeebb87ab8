use std::process::ExitCode;

use mmrelay_cli::{parse_args, run, EXIT_USAGE};

fn main() -> ExitCode {
    let config = match parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let mut out = String::new();
    match run(&config, &mut out) {
        Ok(code) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            print!("{out}");
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
