fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(cvnn_cli::run_cli(&argv));
}
