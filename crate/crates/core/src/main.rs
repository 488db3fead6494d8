fn main() {
    std::process::exit(outsim::cli::main_entry());
}
