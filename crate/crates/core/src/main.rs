fn main() {
    std::process::exit(linksim::cli::run(std::env::args_os()));
}
