use clap::Parser;

use chatmine::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
