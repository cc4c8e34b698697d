fn main() {
    std::process::exit(copeq::cli::main());
}
