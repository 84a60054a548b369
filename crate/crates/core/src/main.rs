fn main() {
    std::process::exit(qvariant::cli::run(std::env::args_os()));
}
