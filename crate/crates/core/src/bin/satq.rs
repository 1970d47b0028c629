fn main() {
    std::process::exit(satq::cli::main_with_args(std::env::args_os()));
}
