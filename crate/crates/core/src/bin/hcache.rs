fn main() -> std::process::ExitCode {
    hypercube_ia::cli::main()
}
