fn main() {
    std::process::exit(trisect::cli::main());
}
