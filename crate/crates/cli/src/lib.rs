//! Command-line front end: scenario files in, CSV or JSON out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::commands::Options;
use crate::config::ScenarioConfig;
use crate::error::{CliError, EXIT_CONFIG, EXIT_OK};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "ehom",
    version,
    about = "Photon-number interference at a two-port beamsplitter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Scenario file (TOML, or JSON when the extension is .json).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted. A directory for cnl-gallery.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Largest photon number kept in matrix outputs.
    #[arg(long, global = true, value_name = "N")]
    cutoff: Option<usize>,
    /// Tail tolerance for states, series tolerance for counting, or absolute
    /// quadrature tolerance for time scans.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    /// Exit with status 3 if the scanned distribution has no nodal line.
    #[arg(long, global = true)]
    expect_cnl: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Joint output distribution P(ma, mb).
    JointDist,
    /// Joint distribution plus a verdict on the diagonal of zeros.
    CnlScan,
    /// Sweep of a space-time coincidence probability.
    TimeScan,
    /// Counting probabilities with finite detector efficiency.
    Counting,
    /// Scattering diagrams of |n,m> into the coincident output.
    Diagrams { n: u32, m: u32 },
    /// Fock 0..3 against coherent and thermal light, one file per panel.
    CnlGallery {
        /// Mean photon number of the coherent and thermal partners.
        #[arg(long, default_value_t = 9.0)]
        mean: f64,
    },
}

fn load(path: Option<&PathBuf>) -> Result<ScenarioConfig, CliError> {
    match path {
        Some(p) => ScenarioConfig::load(p),
        None => Err(CliError::Config("this command needs --config PATH".into())),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    let opts = Options {
        out: g.out,
        format: g.format,
        cutoff: g.cutoff,
        tol: g.tol,
        expect_cnl: g.expect_cnl,
    };
    match cli.command {
        Command::JointDist => commands::joint_dist(load(g.config.as_ref())?, &opts),
        Command::CnlScan => commands::cnl_scan_cmd(load(g.config.as_ref())?, &opts),
        Command::TimeScan => commands::time_scan(load(g.config.as_ref())?, &opts),
        Command::Counting => commands::counting(load(g.config.as_ref())?, &opts),
        Command::Diagrams { n, m } => commands::diagrams(n, m, &opts),
        Command::CnlGallery { mean } => commands::cnl_gallery(mean, &opts),
    }
}

/// Parses `args` and runs the command, returning the process exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("ehom: {e}");
            e.exit_code()
        }
    }
}
