fn main() {
    std::process::exit(phaseplate::cli::main_with_args(std::env::args_os()));
}
