fn main() {
    std::process::exit(p1tr::cli::main_with_args(std::env::args_os()));
}
