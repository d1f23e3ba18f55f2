//! Command-line front end for staircase secret sharing.

pub mod commands;
pub mod error;
pub mod selftest;
pub mod share_file;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::RngCore;
use staircase::SchemeParams;

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "staircase", version, about = "Split files into staircase-coded secret shares")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a file into n share files.
    Split {
        input: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Directory receiving share-1.scss .. share-n.scss.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild the file from share files, reading only what the plan needs.
    Reconstruct {
        #[arg(required = true)]
        shares: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a share's header and its overhead tables.
    Inspect { share: PathBuf },
    /// Raise a share's threshold by truncating it.
    Rethreshold {
        share: PathBuf,
        threshold: usize,
        #[arg(long, required_unless_present = "in_place", conflicts_with = "in_place")]
        out: Option<PathBuf>,
        #[arg(long)]
        in_place: bool,
    },
    /// Show what a reader contacting some number of parties downloads.
    Plan {
        #[command(flatten)]
        scheme: SchemeArgs,
        contacted: usize,
    },
    /// Run the built-in verifier suite.
    Selftest {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Fixed,
    Universal,
    Delta,
}

#[derive(Clone, Debug, Args)]
pub struct SchemeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub z: usize,
    #[arg(long, value_enum, default_value_t = KindArg::Universal)]
    pub kind: KindArg,
    /// Reader size for the fixed kind.
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated reader sizes for the delta kind.
    #[arg(long, value_delimiter = ',')]
    pub delta: Vec<usize>,
}

impl SchemeArgs {
    pub fn params(&self) -> CliResult<SchemeParams> {
        let (n, k, z) = (self.n, self.k, self.z);
        let p = match self.kind {
            KindArg::Fixed => {
                let Some(d) = self.d else {
                    return Err(CliError::Parameter("--kind fixed needs --d".into()));
                };
                if !self.delta.is_empty() {
                    return Err(CliError::Parameter("--delta only applies to --kind delta".into()));
                }
                SchemeParams::fixed(n, k, z, d)?
            }
            KindArg::Universal => {
                if self.d.is_some() || !self.delta.is_empty() {
                    return Err(CliError::Parameter("--d and --delta do not apply to --kind universal".into()));
                }
                SchemeParams::universal(n, k, z)?
            }
            KindArg::Delta => {
                if self.d.is_some() {
                    return Err(CliError::Parameter("--d only applies to --kind fixed".into()));
                }
                SchemeParams::delta(n, k, z, &self.delta)?
            }
        };
        Ok(p)
    }
}

/// Executes one command, writing its report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write, rng: &mut dyn RngCore) -> CliResult<()> {
    match cli.command {
        Command::Split { input, scheme, out: dir } => {
            let params = scheme.params()?;
            let data = std::fs::read(&input)?;
            let rep = commands::split(&data, &params, &dir, rng)?;
            writeln!(out, "scheme: {params}, alpha = {}", rep.alpha)?;
            writeln!(out, "blocks: {}", rep.blocks)?;
            writeln!(out, "payload bytes per share: {}", rep.bytes_per_share)?;
            for p in &rep.paths {
                writeln!(out, "wrote {}", p.display())?;
            }
        }
        Command::Reconstruct { shares, out: path } => {
            let rep = commands::reconstruct_to(&shares, &path)?;
            write!(out, "{}", rep.render())?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::Inspect { share } => write!(out, "{}", commands::inspect(&share)?)?,
        Command::Rethreshold { share, threshold, out: target, in_place } => {
            let target = if in_place { share.clone() } else { target.expect("clap enforces --out") };
            let rep = commands::rethreshold(&share, threshold, &target)?;
            writeln!(
                out,
                "threshold {} -> {}: {} -> {} symbols per block over {} blocks",
                rep.from, rep.to, rep.kept_before, rep.kept_after, rep.blocks
            )?;
            writeln!(out, "wrote {}", target.display())?;
        }
        Command::Plan { scheme, contacted } => write!(out, "{}", commands::plan(&scheme.params()?, contacted)?)?,
        Command::Selftest { max_n, inject_fault } => {
            if !(2..=selftest::MAX_N).contains(&max_n) {
                return Err(CliError::Parameter(format!("--max-n must lie in 2..={}", selftest::MAX_N)));
            }
            let rep = selftest::run(max_n, inject_fault);
            write!(out, "{}", rep.render())?;
            if !rep.pass() {
                let names: Vec<_> = rep.failures().map(|c| c.name.clone()).collect();
                return Err(CliError::SelfTest(names.join(", ")));
            }
        }
    }
    Ok(())
}
