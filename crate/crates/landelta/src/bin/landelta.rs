fn main() {
    std::process::exit(landelta::cli::main_entry());
}
