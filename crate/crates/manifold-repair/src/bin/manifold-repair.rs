fn main() {
    std::process::exit(manifold_repair::cli::run());
}
