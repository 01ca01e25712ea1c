fn main() {
    std::process::exit(hyperlab::cli::main_with(std::env::args_os()));
}
