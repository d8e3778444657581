use std::process::ExitCode;

fn main() -> ExitCode {
    revclass::cli::run(std::env::args_os())
}
