fn main() {
    std::process::exit(bell_ising::cli::main_with_args(std::env::args_os()));
}
