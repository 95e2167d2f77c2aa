fn main() {
    std::process::exit(ohana::cli::main_with(std::env::args()));
}
