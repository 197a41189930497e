use std::process::ExitCode;

fn main() -> ExitCode {
    coalspec::cli::run(std::env::args_os())
}
