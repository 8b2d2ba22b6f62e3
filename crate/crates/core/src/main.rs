fn main() {
    std::process::exit(gratescat::cli::main_with(std::env::args_os()));
}
