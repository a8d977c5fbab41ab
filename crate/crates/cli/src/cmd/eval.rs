use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Result;
use cadseq::cadlang::to_matrix;
use cadseq::geom::{compile, quick_valid, sample_surface};
use cadseq::io::{list_files, read_embeddings, read_point_cloud};
use cadseq::metrics::{
    command_accuracy, generation_quality_with, iou_aligned, pair_by_id, param_accuracy, retrieval_topn_with,
    IouOptions, ItemMetrics, MetricsReport, ReportConfig, RowScope, DEFAULT_ETA, JSD_GRID,
};
use cadseq::par::{self, derive_seed, Exec};
use cadseq::{CadProgram, PointCloud};
use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::input::{load_programs, sidecar_path};
use crate::run::{config_error, Report};
use crate::Ctx;

#[derive(Args, Debug)]
pub struct ReconArgs {
    /// Ground-truth programs.
    #[arg(long)]
    gt: PathBuf,
    /// Predicted programs, matched to ground truth by id.
    #[arg(long)]
    pred: PathBuf,
    /// Parameter tolerance in quantization steps.
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: i16,
    /// Score only rows up to the ground truth's EOS.
    #[arg(long)]
    content_rows_only: bool,
    /// Points per cloud for the chamfer distance.
    #[arg(long, default_value_t = 2000)]
    points: usize,
    /// Monte Carlo samples per IoU estimate (0 skips IoU).
    #[arg(long, default_value_t = 20_000)]
    iou_samples: usize,
}

#[derive(Args, Debug)]
pub struct RetrievalArgs {
    /// Query embeddings (`EMB1` file with a `<file>.json` id manifest).
    #[arg(long)]
    queries: PathBuf,
    /// Library embeddings.
    #[arg(long)]
    library: PathBuf,
    /// Library batch sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [10, 128, 1024, 2048])]
    batch: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Success when the true match ranks within the top N.
    #[arg(long, default_value_t = 1)]
    top_n: usize,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Generated point clouds (PLY/XYZ directory).
    #[arg(long)]
    generated: PathBuf,
    /// Reference point clouds.
    #[arg(long)]
    reference: PathBuf,
    #[arg(long, default_value_t = JSD_GRID)]
    grid: usize,
}

fn programs_by_id(path: &Path) -> Result<(BTreeMap<String, CadProgram>, Vec<String>)> {
    let mut ok = BTreeMap::new();
    let mut bad = Vec::new();
    for l in load_programs(path)? {
        match l.program {
            Ok(p) => {
                ok.insert(l.id, p);
            }
            Err(e) => {
                log::warn!("{}: {e}", l.id);
                bad.push(l.id);
            }
        }
    }
    Ok((ok, bad))
}

fn id_difference<'a>(a: impl Iterator<Item = &'a String>, b: &BTreeMap<String, impl Sized>) -> Vec<&'a String> {
    a.filter(|id| !b.contains_key(*id)).collect()
}

fn score(gt: &CadProgram, pred: &CadProgram, i: usize, args: &ReconArgs, seed: u64) -> Result<ItemMetrics, String> {
    let scope = if args.content_rows_only { RowScope::Content } else { RowScope::All };
    let (mg, mp) = (to_matrix(gt).map_err(|e| e.to_string())?, to_matrix(pred).map_err(|e| e.to_string())?);
    let valid = quick_valid(pred);
    let seed = derive_seed(seed, &[i as u64]);
    let (mut cd, mut iou) = (None, None);
    if valid {
        if let (Ok(sg), Ok(sp)) = (compile(gt), compile(pred)) {
            // Both clouds share a seed so identical programs score exactly zero.
            let s = derive_seed(seed, &[0]);
            if let (Ok(a), Ok(b)) = (sample_surface(&sg, args.points, s), sample_surface(&sp, args.points, s)) {
                cd = Some(cadseq::metrics::chamfer_distance(&a, &b));
            }
            if args.iou_samples > 0 {
                let opts = IouOptions { exec: Exec::Sequential, ..IouOptions::default() };
                iou = iou_aligned(&sg, &sp, args.iou_samples, derive_seed(seed, &[1]), opts).ok();
            }
        }
    }
    Ok(ItemMetrics {
        len: gt.len(),
        cmd_acc: Some(command_accuracy(&mg, &mp, scope)),
        param_acc: param_accuracy(&mg, &mp, args.eta, scope),
        cd,
        iou,
        valid,
    })
}

pub fn recon(args: &ReconArgs, ctx: &Ctx) -> Result<Report> {
    let (gt, gt_bad) = programs_by_id(&args.gt)?;
    let (pred, pred_bad) = programs_by_id(&args.pred)?;
    let missing = id_difference(gt.keys(), &pred);
    let extra = id_difference(pred.keys(), &gt);
    if !missing.is_empty() || !extra.is_empty() {
        return Err(config_error(format!("id sets differ: missing predictions {missing:?}, unmatched predictions {extra:?}")));
    }
    let pairs: Vec<(&CadProgram, &CadProgram)> = gt.iter().map(|(id, g)| (g, &pred[id])).collect();
    let seed = ctx.run.seed;
    let scored = par::map_indexed(ctx.exec, pairs.len(), |i| score(pairs[i].0, pairs[i].1, i, args, seed));
    let mut items = Vec::with_capacity(scored.len());
    let mut failures = gt_bad.len() + pred_bad.len();
    for (r, id) in scored.into_iter().zip(gt.keys()) {
        match r {
            Ok(m) => items.push(m),
            Err(e) => {
                log::warn!("{id}: {e}");
                failures += 1;
            }
        }
    }
    let config = ReportConfig {
        eta: args.eta,
        content_rows_only: args.content_rows_only,
        chamfer_points: args.points,
        iou_samples: args.iou_samples,
        seed,
    };
    let report = MetricsReport::build(&items, config);
    let csv = report.to_csv(&[]);
    Ok(Report { json: serde_json::to_value(&report)?, csv, failures })
}

#[derive(Serialize)]
struct RetrievalRow {
    top_n: usize,
    batch: usize,
    trials: usize,
    accuracy: f64,
    std_error: f64,
    chance: f64,
}

fn load_embeddings(path: &Path) -> Result<cadseq::metrics::EmbeddingSet> {
    let bytes = std::fs::read(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let side = sidecar_path(path);
    let manifest = std::fs::read_to_string(&side).map_err(|e| config_error(format!("{}: {e}", side.display())))?;
    read_embeddings(&bytes, &manifest).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

pub fn retrieval(args: &RetrievalArgs, ctx: &Ctx) -> Result<Report> {
    let q = load_embeddings(&args.queries)?;
    let l = load_embeddings(&args.library)?;
    let pairs = pair_by_id(&q, &l).map_err(|e| config_error(e.to_string()))?;
    let mut rows = Vec::new();
    for &batch in &args.batch {
        if batch > pairs.len() {
            log::warn!("batch {batch} skipped: only {} pairs", pairs.len());
            continue;
        }
        let r = retrieval_topn_with(&q, &l, &pairs, args.top_n, batch, args.trials, ctx.run.seed, ctx.exec)
            .map_err(|e| config_error(e.to_string()))?;
        rows.push(RetrievalRow {
            top_n: r.top_n,
            batch: r.batch,
            trials: r.trials,
            accuracy: r.accuracy,
            std_error: r.std_error,
            chance: (args.top_n as f64 / batch as f64).min(1.0),
        });
    }
    Report::table(&rows, json!({ "pairs": pairs.len(), "dim": q.dim() }), 0)
}

fn clouds(dir: &Path) -> Result<(Vec<PointCloud>, usize)> {
    if !dir.is_dir() {
        return Err(config_error(format!("{} is not a directory", dir.display())));
    }
    let mut out = Vec::new();
    let mut bad = 0;
    for f in list_files(dir, &["ply", "xyz", "txt"])? {
        match read_point_cloud(&f) {
            Ok(pc) if !pc.is_empty() => out.push(pc),
            Ok(_) => bad += 1,
            Err(e) => {
                log::warn!("{}: {e}", f.display());
                bad += 1;
            }
        }
    }
    Ok((out, bad))
}

#[derive(Serialize)]
struct GenRow {
    generated: usize,
    reference: usize,
    jsd: f64,
    cov: f64,
    mmd: f64,
}

pub fn generation(args: &GenArgs, ctx: &Ctx) -> Result<Report> {
    let (gen, gb) = clouds(&args.generated)?;
    let (refs, rb) = clouds(&args.reference)?;
    let q = generation_quality_with(&gen, &refs, args.grid, ctx.exec).map_err(|e| config_error(e.to_string()))?;
    let row = GenRow { generated: gen.len(), reference: refs.len(), jsd: q.jsd, cov: q.cov, mmd: q.mmd };
    Report::table(&[row], json!({ "grid": args.grid }), gb + rb)
}
