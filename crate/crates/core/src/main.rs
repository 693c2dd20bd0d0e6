fn main() {
    std::process::exit(duality::cli::run(std::env::args_os()));
}
