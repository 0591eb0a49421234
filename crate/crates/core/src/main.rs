fn main() {
    std::process::exit(freesplit::cli::main_with_args(std::env::args_os()));
}
