fn main() {
    if let Err(error) = cfchoice::cli::run() {
        eprintln!("error: {error}");
        std::process::exit(1);
    }
}
