fn main() {
    std::process::exit(twosheet::cli::main());
}
