fn main() {
    std::process::exit(diqkd::cli::run(std::env::args_os()))
}
