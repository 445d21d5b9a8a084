fn main() -> std::process::ExitCode {
    calabi_core::cli::main_from_args(std::env::args_os())
}
