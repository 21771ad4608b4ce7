fn main() {
    std::process::exit(fk_rigidity::cli::main_with_args(std::env::args_os()));
}
