fn main() {
    std::process::exit(polymap::cli::run(std::env::args_os()));
}
