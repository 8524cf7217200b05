fn main() {
    std::process::exit(guided_bands::cli::run_command(std::env::args_os()));
}
