use std::process::ExitCode;

use clap::Parser;
use hinfcalc_cli::commands::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { hinfcalc_cli::EXIT_INVALID } else { 0 });
        }
    };
    ExitCode::from(run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()))
}
