use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(modnim::cli::main())
}
