use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(civts::cli::dispatch(std::env::args_os()) as u8)
}
