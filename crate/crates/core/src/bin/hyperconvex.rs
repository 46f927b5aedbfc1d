fn main() {
    std::process::exit(hyperconvex::cli::run(std::env::args_os()));
}
