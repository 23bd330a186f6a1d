fn main() {
    std::process::exit(turanlab::cli::run(std::env::args().skip(1).collect()));
}
