fn main() {
    std::process::exit(rotoseen::cli::main());
}
