fn main() {
    std::process::exit(morseforge::cli::main_with_args(std::env::args_os()));
}
