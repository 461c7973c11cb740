fn main() {
    std::process::exit(beamsim_cli::execute_from_env());
}
