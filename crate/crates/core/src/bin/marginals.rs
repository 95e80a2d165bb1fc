fn main() {
    std::process::exit(marginals::cli::main());
}
