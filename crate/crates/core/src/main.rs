fn main() {
    std::process::exit(shearfront::cli::main_with_args(std::env::args_os()));
}
