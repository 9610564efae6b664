use clap::Parser;

fn main() {
    let cli = ocrisk_cli::Cli::parse();
    if let Err(e) = ocrisk_cli::execute(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
