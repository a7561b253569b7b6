fn main() {
    std::process::exit(apstrip::cli::run(std::env::args_os()));
}
