fn main() {
    std::process::exit(ld3::cli::run(std::env::args()));
}
