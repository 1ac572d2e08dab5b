fn main() -> std::process::ExitCode {
    stemsim::cli::main()
}
