fn main() {
    std::process::exit(tncircuit::cli::main_with_args(std::env::args_os()));
}
