fn main() {
    std::process::exit(lacuna::cli::run());
}
