fn main() {
    std::process::exit(esncache::cli::run(std::env::args_os()));
}
