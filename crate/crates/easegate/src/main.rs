fn main() {
    std::process::exit(easegate::cli::run());
}
