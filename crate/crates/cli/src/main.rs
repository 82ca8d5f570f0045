fn main() {
    std::process::exit(srs_cli::run(std::env::args_os()));
}
