fn main() {
    if let Err(e) = lwc::cli::configure_threads() {
        eprintln!("error: {e}");
        std::process::exit(lwc::cli::EXIT_VALIDATION);
    }
    std::process::exit(lwc::cli::run(std::env::args_os()));
}
