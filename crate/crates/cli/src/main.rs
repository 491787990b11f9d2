use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use motility_cli::{run, Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "motility",
    version,
    about = "Fronts of a population structured by motility"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides one key; repeatable, applied after the file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Existing output directory; overrides `out_dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dispersion curve and minimal speed.
    Spectral,
    /// Integrate the population model.
    Simulate,
    /// Hamilton-Jacobi limit against the explicit front.
    Hj,
    /// Run the verification checks; exit 1 if any fails.
    Verify,
    /// Print every configuration key with its default and range.
    Keys,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Spectral => Command::Spectral,
        Cmd::Simulate => Command::Simulate,
        Cmd::Hj => Command::Hj,
        Cmd::Verify => Command::Verify,
        Cmd::Keys => {
            print!("{}", RunConfig::reference());
            return ExitCode::SUCCESS;
        }
    };
    let mut overrides = cli.set;
    if let Some(out) = cli.out {
        overrides.push(format!("out_dir = {}", out.display()));
    }
    let code = match RunConfig::load(cli.config.as_deref(), &overrides)
        .map_err(Into::into)
        .and_then(|cfg| run(command, &cfg))
    {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
