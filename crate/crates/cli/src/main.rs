use std::process::ExitCode;

fn main() -> ExitCode {
    gridfreq::main_with_args(std::env::args_os())
}
