fn main() -> std::process::ExitCode {
    indstab_cli::main()
}
