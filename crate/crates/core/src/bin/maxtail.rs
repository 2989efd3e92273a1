fn main() {
    std::process::exit(maxtail::cli::run(std::env::args_os()));
}
