fn main() {
    std::process::exit(entconc_cli::run(std::env::args_os()));
}
