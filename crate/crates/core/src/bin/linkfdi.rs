fn main() {
    std::process::exit(linkfdi::cli::run(std::env::args_os()));
}
