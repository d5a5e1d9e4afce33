fn main() {
    std::process::exit(vpc::cli::main());
}
