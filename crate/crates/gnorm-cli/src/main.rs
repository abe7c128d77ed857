fn main() {
    std::process::exit(gnorm_cli::run(std::env::args_os()));
}
