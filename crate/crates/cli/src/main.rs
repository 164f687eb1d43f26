fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(cone_ends_cli::run_args(std::env::args_os()))
}
