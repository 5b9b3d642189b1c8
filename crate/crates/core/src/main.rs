fn main() {
    std::process::exit(knotcg::cli::run(std::env::args_os()));
}
