fn main() -> std::process::ExitCode {
    hypergauss::cli::main()
}
