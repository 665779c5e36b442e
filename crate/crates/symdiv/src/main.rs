use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(symdiv::cli::run(std::env::args_os()))
}
