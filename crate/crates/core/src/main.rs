fn main() {
    std::process::exit(vacuum1d::cli::main_with_args(std::env::args_os()));
}
