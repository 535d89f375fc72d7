fn main() {
    std::process::exit(qqent::cli::run(std::env::args_os()));
}
