fn main() {
    std::process::exit(tmnlcs::cli::run(std::env::args_os()));
}
