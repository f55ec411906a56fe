use clap::Parser;
use qclock_cli::{run, Cli, SEED_ENV};

fn main() {
    let cli = Cli::parse();
    let env_seed = std::env::var(SEED_ENV).ok();
    let code = match run(&cli.command, env_seed.as_deref()).and_then(|o| o.write().map(|_| o)) {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
