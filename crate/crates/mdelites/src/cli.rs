//! Argument parsing and exit codes.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;

#[derive(Debug, Parser)]
#[command(name = "mdelites", version, about = "MAP-Elites for micro-depot delivery planning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the search and write archive.csv, history.log and manifest.json.
    Run(RunArgs),
    /// Print the timeline of one bin.
    History(HistoryArgs),
    /// Score archived solutions against a pattern catalogue.
    Match(MatchArgs),
    /// Bundle a run directory into map.json for the visualiser.
    ExportUi(ExportUiArgs),
    /// Serve a run directory over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Instance JSON file.
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Evaluation budget, seeding included.
    #[arg(long)]
    pub evals: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Fixed bounds instead of calibration: a JSON array of four `[lo, hi]`
    /// pairs (couriers, emissions, distance, time), inline or in a file.
    #[arg(long)]
    pub bounds: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub crossover_rate: f64,
    /// Number of random individuals evaluated before selection starts.
    #[arg(long, default_value_t = 100)]
    pub init: u64,
    /// Bins per dimension.
    #[arg(long, default_value_t = mdelites_core::archive::DEFAULT_SCALE)]
    pub scale: u16,
    /// Random chromosomes sampled to calibrate bounds.
    #[arg(long, default_value_t = 1000)]
    pub calibration_samples: usize,
}

#[derive(Debug, Args)]
pub struct HistoryArgs {
    #[arg(long, default_value = crate::HISTORY_LOG)]
    pub log: PathBuf,
    /// Bin key `a:b:c:d`.
    pub bin: String,
    /// Bins per dimension; defaults to the scale in the manifest next to the
    /// log, or 20.
    #[arg(long)]
    pub scale: Option<u16>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub archive: PathBuf,
    /// Catalogue file, one `label<TAB>regex` per line.
    #[arg(long)]
    pub catalogue: PathBuf,
    /// Annotation CSV; defaults to annotations.csv beside the archive.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportUiArgs {
    /// Run directory; map.json is written into it.
    #[arg(long)]
    pub out: PathBuf,
    /// Include this catalogue and per-cell annotations in the bundle.
    #[arg(long)]
    pub catalogue: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = ".")]
    pub dir: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8000")]
    pub addr: String,
}

/// Parses `args` and runs the command. Returns the process exit code:
/// 0 on success, 1 for usage and input errors, 2 for internal failures.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayVersion};
            let informational = matches!(e.kind(), DisplayHelp | DisplayVersion);
            let rendered = e.render();
            let _ = if informational {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return if informational { 0 } else { 1 };
        }
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| commands::dispatch(cli.command, stdout)));
    match result {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
        Err(_) => {
            let _ = writeln!(stderr, "error: internal failure");
            2
        }
    }
}
