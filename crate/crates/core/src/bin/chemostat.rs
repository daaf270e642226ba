fn main() {
    std::process::exit(chemostat_core::cli::main());
}
