use clap::Parser;
use selfsim::Kind;
use selfsim_cli::args::{Cli, Command};
use selfsim_cli::commands::{cmd_rescale_check, cmd_solve, cmd_sweep, cmd_verify};
use selfsim_cli::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::SolveFde(a) => {
            cmd_solve(Kind::Fde, &a.model, &a.solver, &a.sample, &a.out, a.config.as_deref())?;
        }
        Command::SolveLde(a) => {
            cmd_solve(Kind::Lde, &a.model.into(), &a.solver, &a.sample, &a.out, a.config.as_deref())?;
        }
        Command::Verify(a) => {
            cmd_verify(&a)?;
        }
        Command::Sweep(a) => {
            cmd_sweep(&a)?;
        }
        Command::RescaleCheck(a) => {
            cmd_rescale_check(&a)?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
