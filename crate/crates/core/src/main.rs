use std::process::ExitCode;

fn main() -> ExitCode {
    cellsim::cli::main_with_args(std::env::args_os())
}
