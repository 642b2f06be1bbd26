fn main() {
    std::process::exit(gheat::cli::run(std::env::args_os()));
}
