use clap::Parser;

fn main() {
    let cli = dimred::cli::Cli::parse();
    if let Err(e) = dimred::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
