fn main() {
    std::process::exit(cvtri_cli::main_with_args(std::env::args_os()));
}
