use clap::error::ErrorKind;
use clap::Parser;

use kobe_core::cli::{emit, run, Cli, Command};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(1);
        }
    };

    let config = match &cli.command {
        Command::Score(args) => args.config.clone(),
        Command::Correlate(args) => args.config.clone(),
        Command::Stats(args) => args.config.clone(),
        Command::Report(args) => args.config.clone(),
        Command::Link(args) => args.config.clone(),
    };

    match run(&cli) {
        Ok(payload) => {
            // link writes its annotation files itself; its payload is the
            // summary, which always goes to stdout.
            let result = if matches!(cli.command, Command::Link(_)) {
                print!("{payload}");
                Ok(())
            } else {
                emit(&config, &payload)
            };
            if let Err(e) = result {
                eprintln!("error: {e}");
                std::process::exit(e.exit_code());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
