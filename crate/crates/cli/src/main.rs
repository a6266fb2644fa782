fn main() {
    std::process::exit(hecke_cli::main_with_args(std::env::args_os()));
}
