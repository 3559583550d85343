fn main() {
    std::process::exit(randp::cli::main());
}
