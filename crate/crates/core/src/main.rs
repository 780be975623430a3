fn main() {
    std::process::exit(tsperm::cli::execute(std::env::args()));
}
