fn main() {
    std::process::exit(floqca_cli::run());
}
