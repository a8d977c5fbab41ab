use std::collections::HashMap;
use std::path::PathBuf;

use anyhow::Result;
use cadseq::io::dataset_lengths;
use cadseq::synthbal::{
    generate_synthbal, length_histogram, reduction_balance, share_at_most, share_of, AugmentationPolicy, Dataset,
    PolicyKind, SynthBalConfig, RETRY_BUDGET,
};
use clap::Args;
use serde_json::json;

use crate::run::{config_error, Report};
use crate::Ctx;

#[derive(Args, Debug)]
pub struct SynthbalArgs {
    /// Dataset directory (`manifest.jsonl` + `programs/`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Target dataset size.
    #[arg(long, default_value_t = 170_000)]
    size: usize,
    /// Cap on the real-data share of each length bin.
    #[arg(long, default_value_t = 0.2)]
    real_ratio: f64,
    /// Augmentation policy: default, noise-only, noiseless, no-pure-noise,
    /// reduced-noise, replace-extrude, re-extrude, arc-augment, noisy-rre, rre
    #[arg(long, default_value = "default", value_parser = parse_policy)]
    policy: PolicyKind,
    /// Keep synthetic programs without validity checks.
    #[arg(long, conflicts_with = "validate")]
    no_validate: bool,
    /// Check validity even for policies that skip it by default.
    #[arg(long)]
    validate: bool,
    /// Attempts per synthetic slot.
    #[arg(long, default_value_t = RETRY_BUDGET)]
    retry_budget: usize,
}

fn parse_policy(s: &str) -> Result<PolicyKind, String> {
    s.parse()
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Target dataset size.
    #[arg(long, default_value_t = 4503)]
    size: usize,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Dataset directory, program directory or record file.
    #[arg(long)]
    input: Option<PathBuf>,
}

fn load_dataset(path: &std::path::Path) -> Result<Dataset> {
    Dataset::load(path).map_err(|e| config_error(format!("loading dataset {}: {e}", path.display())))
}

pub fn synthbal(args: &SynthbalArgs, ctx: &Ctx) -> Result<Report> {
    let input = ctx.input(&args.input)?;
    let dir = ctx.out_dir()?;
    let data = load_dataset(&input)?;
    let policy = AugmentationPolicy::named(args.policy);
    let mut cfg = SynthBalConfig::new(args.real_ratio, args.size, policy, ctx.run.seed);
    if args.no_validate {
        cfg.validate = false;
    }
    if args.validate {
        cfg.validate = true;
    }
    cfg.retry_budget = args.retry_budget;
    let (out, report) = generate_synthbal(&data, &cfg, ctx.exec).map_err(|e| config_error(e.to_string()))?;
    out.save(&dir)?;
    let unmeetable = report.unmeetable().count();
    for b in report.unmeetable() {
        log::warn!("{} length {}: {} of {} slots unfilled", b.split, b.len, b.unfilled, b.quota);
    }
    let extra = json!({
        "policy": cfg.policy,
        "validate": cfg.validate,
        "entries": out.manifest.len(),
        "split_targets": report.split_targets,
        "unmeetable_bins": unmeetable,
    });
    let r = Report::table(&report.bins, extra, unmeetable)?;
    ctx.run.write_sidecar(&dir, &r.json)?;
    Ok(r)
}

pub fn reduce(args: &ReduceArgs, ctx: &Ctx) -> Result<Report> {
    let input = ctx.input(&args.input)?;
    let dir = ctx.out_dir()?;
    let data = load_dataset(&input)?;
    let (manifest, report) =
        reduction_balance(&data.manifest, args.size, ctx.run.seed).map_err(|e| config_error(e.to_string()))?;
    let programs: HashMap<_, _> =
        manifest.entries().iter().map(|e| (e.id.clone(), data.programs[&e.id].clone())).collect();
    Dataset { manifest, programs }.save(&dir)?;
    let extra = json!({ "quota": report.quota, "lengths": report.lengths });
    let r = Report::table(&report.shortfalls, extra, 0)?;
    ctx.run.write_sidecar(&dir, &r.json)?;
    Ok(r)
}

pub fn stats(args: &StatsArgs, ctx: &Ctx) -> Result<Report> {
    let input = ctx.input(&args.input)?;
    if !input.exists() {
        return Err(config_error(format!("input {} does not exist", input.display())));
    }
    let (lengths, failed) = dataset_lengths(&input)?;
    let rows = length_histogram(lengths.iter().copied());
    let extra = json!({
        "programs": lengths.len(),
        "unreadable": failed,
        "share_len_at_most_6": share_at_most(&rows, 6),
        "share_len_6": share_of(&rows, 6),
    });
    Report::table(&rows, extra, failed)
}
