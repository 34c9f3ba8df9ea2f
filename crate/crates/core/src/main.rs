fn main() {
    std::process::exit(lazylab::cli::main(std::env::args().collect()));
}
