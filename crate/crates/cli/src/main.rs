fn main() {
    std::process::exit(fracspec_cli::main_with(std::env::args_os()));
}
