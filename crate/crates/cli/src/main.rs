fn main() {
    std::process::exit(birthday_cli::main_with_args(std::env::args_os()));
}
