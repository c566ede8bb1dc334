fn main() {
    std::process::exit(opgf::cli::run(std::env::args_os()));
}
