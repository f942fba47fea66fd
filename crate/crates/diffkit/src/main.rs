fn main() {
    std::process::exit(diffkit::cli::run());
}
