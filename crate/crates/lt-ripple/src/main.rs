fn main() {
    let argv: Vec<String> = std::env::args().collect();
    if let Err(e) = lt_ripple::cli::run(&argv) {
        // one line per failure, kind prefix first, nothing written
        eprintln!("error: {}", e.to_string().replace('\n', "; "));
        std::process::exit(1);
    }
}
