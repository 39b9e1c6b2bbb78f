use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cgc::run(std::env::args_os()))
}
