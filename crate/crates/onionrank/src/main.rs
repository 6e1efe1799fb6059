fn main() {
    std::process::exit(onionrank::cli::main_with_args(std::env::args_os()));
}
