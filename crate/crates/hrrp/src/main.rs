use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(hrrp::cli::run(std::env::args()) as u8)
}
