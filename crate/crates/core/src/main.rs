fn main() {
    let code = sumdiff::cli::run(std::env::args_os());
    std::process::exit(code);
}
