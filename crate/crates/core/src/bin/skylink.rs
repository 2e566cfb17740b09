fn main() {
    std::process::exit(skylink::cli::main_with_args(std::env::args_os()));
}
