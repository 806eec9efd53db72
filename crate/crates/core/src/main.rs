fn main() -> std::process::ExitCode {
    navsim::cli::main()
}
