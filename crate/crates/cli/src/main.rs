use clap::Parser;
use forge_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let level = if cli.command.common().verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let mut stdout = std::io::stdout();
    if let Err(f) = run(&cli.command, &mut stdout) {
        eprintln!("forge: {}", f.message);
        std::process::exit(f.code);
    }
}
