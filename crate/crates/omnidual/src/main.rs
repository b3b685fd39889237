use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use omnidual::cli_io::{load, run, CliError, Command, ReportFormat, RunOptions};
use omnidual::omni_fiber::Mode;

#[derive(Parser)]
#[command(
    name = "omnidual",
    version,
    about = "Exact checks for Dirac-Jacobi structures and weak dual pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(clap::Args)]
struct Common {
    /// Instance document (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random sample points per instance.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    report: Format,
    /// Fail sampled verdicts resting on fewer than 5 points.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Involutivity and leaf types of every structure in the document.
    CheckStructure,
    /// The weak dual pair criteria on every instance.
    VerifyPair,
    /// Compose the listed pairs and verify the results.
    Compose,
    /// Transverse pullbacks and normal-form witnesses.
    Pullback,
    /// Random linear self-dual models.
    Selfdual {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Leaf correspondence on the listed instances.
    Leafcorr,
    /// Rerun the built-in worked examples against their stored values.
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Jacobi,
    Dirac,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut opts = RunOptions {
        seed: cli.common.seed,
        samples: cli.common.samples,
        mode: cli.common.mode.map(|m| match m {
            ModeArg::Jacobi => Mode::Jacobi,
            ModeArg::Dirac => Mode::Dirac,
        }),
        strict: cli.common.strict,
        ..RunOptions::default()
    };
    let command = match cli.command {
        Cmd::CheckStructure => Command::CheckStructure,
        Cmd::VerifyPair => Command::VerifyPair,
        Cmd::Compose => Command::Compose,
        Cmd::Pullback => Command::Pullback,
        Cmd::Selfdual { dim, count } => {
            opts.dim = dim;
            opts.count = count;
            Command::Selfdual
        }
        Cmd::Leafcorr => Command::Leafcorr,
        Cmd::Oracle => Command::Oracle,
    };
    let format = match cli.common.report {
        Format::Json => ReportFormat::Json,
        Format::Text => ReportFormat::Text,
    };
    match execute(command, cli.common.input, &opts) {
        Ok(report) => {
            print!("{}", report.render(format));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            let diag = serde_json::json!({ "error": e.to_string() });
            eprintln!("{diag}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(
    command: Command,
    input: Option<PathBuf>,
    opts: &RunOptions,
) -> Result<omnidual::cli_io::Report, CliError> {
    let doc = match input {
        Some(p) => {
            let bytes =
                std::fs::read(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Some(load(&bytes)?)
        }
        None if command.needs_input() => {
            return Err(CliError::Usage(format!(
                "{} needs --input FILE",
                command.name()
            )))
        }
        None => None,
    };
    run(command, doc.as_ref(), opts)
}
