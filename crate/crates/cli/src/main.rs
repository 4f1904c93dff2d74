fn main() {
    std::process::exit(spinex_cli::run(std::env::args_os()));
}
