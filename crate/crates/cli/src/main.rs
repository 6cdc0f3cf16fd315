fn main() {
    std::process::exit(deltamod_cli::run(std::env::args_os()));
}
