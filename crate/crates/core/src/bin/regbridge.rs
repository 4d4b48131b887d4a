fn main() {
    std::process::exit(regbridge::cli::main());
}
