fn main() {
    std::process::exit(rbkit_cli::run(std::env::args_os()));
}
