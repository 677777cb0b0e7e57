use clap::Parser;

fn main() {
    let cli = hypertope_cli::Cli::parse();
    if let Err(err) = hypertope_cli::execute(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
