fn main() {
    std::process::exit(matchkern::cli::run(std::env::args_os()));
}
