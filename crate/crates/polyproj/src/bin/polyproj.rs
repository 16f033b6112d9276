fn main() {
    std::process::exit(polyproj::cli::run());
}
