use clap::Parser;
use storynet_cli::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Err(e) = run(cli, argv) {
        eprintln!("storynet: {e}");
        std::process::exit(e.exit_code());
    }
}
