fn main() {
    std::process::exit(sqprobe::cli::main_with_args(std::env::args_os()));
}
