use std::process::ExitCode;

fn main() -> ExitCode {
    tvwalk::cli::run(std::env::args())
}
