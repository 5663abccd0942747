fn main() {
    std::process::exit(altflow::cli::run(std::env::args_os()));
}
