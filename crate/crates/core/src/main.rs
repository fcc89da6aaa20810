fn main() {
    std::process::exit(wittlab::cli::run());
}
