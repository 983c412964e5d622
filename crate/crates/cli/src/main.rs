use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ehom_cli::run(std::env::args_os()))
}
