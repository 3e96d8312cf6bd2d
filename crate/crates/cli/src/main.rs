fn main() {
    std::process::exit(htype_cli::main_with_args(std::env::args_os()));
}
