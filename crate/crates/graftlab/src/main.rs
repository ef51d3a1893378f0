fn main() {
    std::process::exit(graftlab::cli::run());
}
