fn main() {
    std::process::exit(ordcert::cli::run(std::env::args()));
}
