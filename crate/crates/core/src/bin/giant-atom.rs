fn main() {
    std::process::exit(giant_atom::cli::main_with_args(std::env::args_os()));
}
