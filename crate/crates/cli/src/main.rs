use std::process::ExitCode;

use clap::Parser;
use hamcore_cli::args::{Cli, Command};
use hamcore_cli::{cmd_experiment, cmd_generate, cmd_pack, cmd_verify, init_logging, Status};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Violation as u8 } else { 0 });
        }
    };
    init_logging();
    let mut out = std::io::stdout().lock();
    let res = match &cli.command {
        Command::Generate(a) => cmd_generate(a, &mut out),
        Command::Pack(a) => cmd_pack(a, &mut out),
        Command::Experiment(a) => cmd_experiment(a, &mut out),
        Command::Verify(a) => cmd_verify(a, &mut out),
    };
    match res {
        Ok(s) => ExitCode::from(s as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status as u8)
        }
    }
}
