fn main() -> std::process::ExitCode {
    polar_dvc::harness::cli::main()
}
