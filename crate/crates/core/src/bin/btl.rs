fn main() {
    std::process::exit(tower_bubbles::cli::main_with_args(std::env::args_os()));
}
