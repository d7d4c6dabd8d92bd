fn main() {
    let code = cwforest::cli::run_cli(std::env::args_os());
    std::process::exit(code);
}
