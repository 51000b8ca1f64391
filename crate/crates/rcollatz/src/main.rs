fn main() -> std::process::ExitCode {
    rcollatz::cli::run()
}
