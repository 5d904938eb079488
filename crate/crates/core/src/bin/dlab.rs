fn main() {
    std::process::exit(dirichlet_lab::cli::main());
}
