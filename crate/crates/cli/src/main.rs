mod cmd;
mod input;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use cadseq::Exec;
use clap::{CommandFactory, Parser, Subcommand};

use crate::run::{Format, Report, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "cadseq", version, about = "Sketch-and-extrude CAD program toolkit")]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (1 runs sequentially; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Dataset root used when `--input` is omitted.
    #[arg(long, global = true, env = "CADSEQ_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Program JSON files to a binary matrix file.
    Encode(cmd::codec::EncodeArgs),
    /// Binary matrix file to program JSON files.
    Decode(cmd::codec::DecodeArgs),
    /// Compile programs to solids and report their structure and volume.
    Compile(cmd::geometry::CompileArgs),
    /// Run the validity checks on programs.
    Validate(cmd::geometry::ValidateArgs),
    /// Sample surface point clouds from programs.
    Sample(cmd::geometry::SampleArgs),
    /// Build a length-balanced dataset with synthetic augmentation.
    Synthbal(cmd::dataset::SynthbalArgs),
    /// Down-sample a dataset to equal counts per length.
    Reduce(cmd::dataset::ReduceArgs),
    /// Sequence-length histogram of a dataset.
    Stats(cmd::dataset::StatsArgs),
    /// Normalize and subsample a scanned point cloud.
    IngestScan(cmd::scan::IngestArgs),
    /// Reconstruction metrics of predicted against ground-truth programs.
    EvalRecon(cmd::eval::ReconArgs),
    /// Top-N cross-modal retrieval accuracy.
    EvalRetrieval(cmd::eval::RetrievalArgs),
    /// JSD, coverage and MMD of generated against reference clouds.
    EvalGen(cmd::eval::GenArgs),
    /// Numerical checks of the contrastive and diffusion losses.
    LossCheck(cmd::losscheck::LossCheckArgs),
}

/// Shared context handed to every command.
pub struct Ctx {
    pub run: RunConfig,
    pub exec: Exec,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub data_dir: Option<PathBuf>,
}

impl Ctx {
    /// `explicit`, else the dataset root.
    pub fn input(&self, explicit: &Option<PathBuf>) -> Result<PathBuf> {
        explicit
            .clone()
            .or_else(|| self.data_dir.clone())
            .ok_or_else(|| run::config_error("no --input given and CADSEQ_DATA_DIR is unset"))
    }

    pub fn out_dir(&self) -> Result<PathBuf> {
        let dir = self.out.clone().ok_or_else(|| run::config_error("this command needs --out DIR"))?;
        std::fs::create_dir_all(&dir)?;
        Ok(dir)
    }
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<Report> {
    match cmd {
        Command::Encode(a) => cmd::codec::encode(a, ctx),
        Command::Decode(a) => cmd::codec::decode(a, ctx),
        Command::Compile(a) => cmd::geometry::compile(a, ctx),
        Command::Validate(a) => cmd::geometry::validate(a, ctx),
        Command::Sample(a) => cmd::geometry::sample(a, ctx),
        Command::Synthbal(a) => cmd::dataset::synthbal(a, ctx),
        Command::Reduce(a) => cmd::dataset::reduce(a, ctx),
        Command::Stats(a) => cmd::dataset::stats(a, ctx),
        Command::IngestScan(a) => cmd::scan::ingest(a, ctx),
        Command::EvalRecon(a) => cmd::eval::recon(a, ctx),
        Command::EvalRetrieval(a) => cmd::eval::retrieval(a, ctx),
        Command::EvalGen(a) => cmd::eval::generation(a, ctx),
        Command::LossCheck(a) => cmd::losscheck::loss_check(a, ctx),
    }
}

/// Report destination: directory-producing commands print to stdout.
fn report_target(cmd: &Command, ctx: &Ctx) -> Option<PathBuf> {
    match cmd {
        Command::Encode(_)
        | Command::Decode(_)
        | Command::Sample(_)
        | Command::Synthbal(_)
        | Command::Reduce(_)
        | Command::IngestScan(_) => None,
        _ => ctx.out.clone(),
    }
}

fn execute(cli: Cli) -> Result<Report> {
    let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let subcommand = std::env::args().skip(1).find(|a| names.contains(a)).unwrap_or_default();
    let run = RunConfig {
        tool: "cadseq",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        args: std::env::args().skip(1).collect(),
        seed: cli.seed,
        threads: cli.threads,
    };
    let exec = if cli.threads == Some(1) { Exec::Sequential } else { Exec::Parallel };
    let ctx = Ctx { run, exec, out: cli.out.clone(), format: cli.format, data_dir: cli.data_dir.clone() };
    let report = in_pool(cli.threads, || dispatch(&cli.command, &ctx))??;
    report.emit(&ctx.run, ctx.format, report_target(&cli.command, &ctx).as_deref())?;
    Ok(report)
}

#[cfg(feature = "parallel")]
fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(0) => Err(run::config_error("--threads must be at least 1")),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

#[cfg(not(feature = "parallel"))]
fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == Some(0) {
        return Err(run::config_error("--threads must be at least 1"));
    }
    Ok(f())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(r) if r.failures > 0 => {
            log::warn!("{} item(s) failed", r.failures);
            ExitCode::from(1)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
