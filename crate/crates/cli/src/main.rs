use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(hlpicone::run(std::env::args_os()))
}
