use std::path::PathBuf;

use anyhow::Result;
use cadseq::geom::{self, is_valid, monte_carlo_volume_with, sample_surface};
use cadseq::io::{write_ply, PlyEncoding};
use cadseq::par::{self, derive_seed, Exec};
use cadseq::{CadProgram, PointCloud};
use clap::{Args, ValueEnum};
use rand::seq::index::sample as sample_indices;
use serde::Serialize;
use serde_json::json;

use crate::input::{load_programs, write_item, Loaded};
use crate::run::Report;
use crate::Ctx;

#[derive(Args, Debug)]
pub struct CompileArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Monte Carlo samples for the volume estimate (0 skips it).
    #[arg(long, default_value_t = 20_000)]
    volume_samples: usize,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Encoding {
    Ascii,
    Binary,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Points per cloud.
    #[arg(long, default_value_t = 4096)]
    points: usize,
    /// Store outward normals.
    #[arg(long)]
    normals: bool,
    /// Also write a random subset of this many points per cloud.
    #[arg(long)]
    subsample: Option<usize>,
    #[arg(long, value_enum, default_value_t = Encoding::Binary)]
    encoding: Encoding,
}

/// Splits loaded items into parseable programs and per-file failures.
fn partition(loaded: Vec<Loaded>) -> (Vec<CadProgram>, Vec<(String, String)>) {
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for l in loaded {
        match l.program {
            Ok(p) => ok.push(p),
            Err(e) => {
                log::warn!("{}: {e}", l.id);
                bad.push((l.id, e));
            }
        }
    }
    (ok, bad)
}

fn id(p: &CadProgram) -> String {
    p.source_id.clone().unwrap_or_default()
}

#[derive(Serialize)]
struct CompileRow {
    id: String,
    len: usize,
    ok: bool,
    terms: Option<usize>,
    volume: Option<f64>,
    volume_std_error: Option<f64>,
    bbox_diagonal: Option<f64>,
    error: Option<String>,
}

pub fn compile(args: &CompileArgs, ctx: &Ctx) -> Result<Report> {
    let (programs, bad) = partition(load_programs(&ctx.input(&args.input)?)?);
    let seed = ctx.run.seed;
    let mut rows = par::map_indexed(ctx.exec, programs.len(), |i| {
        let p = &programs[i];
        let base = CompileRow {
            id: id(p),
            len: p.len(),
            ok: false,
            terms: None,
            volume: None,
            volume_std_error: None,
            bbox_diagonal: None,
            error: None,
        };
        match geom::compile(p) {
            Err(e) => CompileRow { error: Some(e.to_string()), ..base },
            Ok(s) => {
                let v = (args.volume_samples > 0)
                    .then(|| monte_carlo_volume_with(&s, args.volume_samples, derive_seed(seed, &[i as u64]), Exec::Sequential));
                CompileRow {
                    ok: true,
                    terms: Some(s.terms.len()),
                    volume: v.map(|v| v.volume),
                    volume_std_error: v.map(|v| v.std_error),
                    bbox_diagonal: Some(s.bbox.diagonal()),
                    ..base
                }
            }
        }
    });
    let failed = rows.iter().filter(|r| !r.ok).count();
    rows.extend(bad.iter().map(|(id, e)| CompileRow {
        id: id.clone(),
        len: 0,
        ok: false,
        terms: None,
        volume: None,
        volume_std_error: None,
        bbox_diagonal: None,
        error: Some(e.clone()),
    }));
    Report::table(&rows, json!({ "compiled": rows.len() - failed - bad.len(), "failed": failed }), bad.len())
}

#[derive(Serialize)]
struct ValidityRow {
    id: String,
    len: usize,
    compiles: bool,
    self_intersection_free: bool,
    samplable: bool,
    valid: bool,
    detail: String,
}

pub fn validate(args: &ValidateArgs, ctx: &Ctx) -> Result<Report> {
    let (programs, bad) = partition(load_programs(&ctx.input(&args.input)?)?);
    let mut rows = par::map_slice(ctx.exec, &programs, |p| {
        let r = is_valid(p);
        ValidityRow {
            id: id(p),
            len: p.len(),
            compiles: r.compiles,
            self_intersection_free: r.self_intersection_free,
            samplable: r.samplable,
            valid: r.is_valid(),
            detail: r.failure_detail,
        }
    });
    let invalid = rows.iter().filter(|r| !r.valid).count();
    let ratio = if rows.is_empty() { None } else { Some(invalid as f64 / rows.len() as f64) };
    rows.extend(bad.iter().map(|(id, e)| ValidityRow {
        id: id.clone(),
        len: 0,
        compiles: false,
        self_intersection_free: false,
        samplable: false,
        valid: false,
        detail: format!("unreadable: {e}"),
    }));
    let extra = json!({ "programs": programs.len(), "invalid": invalid, "invalid_ratio": ratio });
    Report::table(&rows, extra, bad.len())
}

#[derive(Serialize)]
struct SampleRow {
    id: String,
    ok: bool,
    points: usize,
    seed: u64,
    error: Option<String>,
}

/// Random `k`-point subset without replacement.
pub fn subsample(pc: &PointCloud, k: usize, seed: u64) -> PointCloud {
    let mut idx = sample_indices(&mut par::rng_from(seed, &[]), pc.len(), k.min(pc.len())).into_vec();
    idx.sort_unstable();
    PointCloud {
        points: idx.iter().map(|&i| pc.points[i]).collect(),
        normals: pc.normals.as_ref().map(|n| idx.iter().map(|&i| n[i]).collect()),
        seed: Some(seed),
        source_id: pc.source_id.clone(),
    }
}

pub fn sample(args: &SampleArgs, ctx: &Ctx) -> Result<Report> {
    let dir = ctx.out_dir()?;
    let (programs, bad) = partition(load_programs(&ctx.input(&args.input)?)?);
    let encoding = match args.encoding {
        Encoding::Ascii => PlyEncoding::Ascii,
        Encoding::Binary => PlyEncoding::BinaryLittleEndian,
    };
    let comments = vec![format!("run {}", ctx.run.line())];
    let master = ctx.run.seed;
    let results = par::map_indexed(ctx.exec, programs.len(), |i| {
        let p = &programs[i];
        let seed = derive_seed(master, &[i as u64]);
        let cloud = geom::compile(p)
            .map_err(|e| e.to_string())
            .and_then(|s| sample_surface(&s, args.points, seed).map_err(|e| e.to_string()))
            .map(|mut pc| {
                pc.source_id = p.source_id.clone();
                if !args.normals {
                    pc.normals = None;
                }
                pc
            });
        (seed, cloud)
    });
    let mut rows = Vec::with_capacity(programs.len() + bad.len());
    for (p, (seed, cloud)) in programs.iter().zip(results) {
        let id = id(p);
        match cloud {
            Ok(pc) => {
                write_item(&dir, &id, ".ply", &write_ply(&pc, encoding, &comments))?;
                if let Some(k) = args.subsample {
                    let sub = subsample(&pc, k, derive_seed(seed, &[k as u64]));
                    write_item(&dir, &id, &format!(".sub{k}.ply"), &write_ply(&sub, encoding, &comments))?;
                }
                rows.push(SampleRow { id, ok: true, points: pc.len(), seed, error: None });
            }
            Err(e) => {
                log::warn!("{id}: skipped: {e}");
                rows.push(SampleRow { id, ok: false, points: 0, seed, error: Some(e) });
            }
        }
    }
    rows.extend(bad.into_iter().map(|(id, e)| SampleRow { id, ok: false, points: 0, seed: 0, error: Some(e) }));
    let failures = rows.iter().filter(|r| !r.ok).count();
    let report = Report::table(&rows, json!({ "written": rows.len() - failures, "skipped": failures }), failures)?;
    ctx.run.write_sidecar(&dir, &report.json)?;
    Ok(report)
}
