use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cvcat_cli::run(std::env::args_os()))
}
