fn main() {
    std::process::exit(lacunary::cli::main_exit());
}
