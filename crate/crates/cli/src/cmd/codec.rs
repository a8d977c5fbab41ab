use std::path::PathBuf;

use anyhow::{Context, Result};
use cadseq::cadlang::{from_matrix, program_to_json, read_records, to_matrix, write_records};
use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::input::{load_programs, record_ids, sidecar_path, write_item};
use crate::run::{config_error, Report};
use crate::Ctx;

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// Program JSON file or directory.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Binary matrix file.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Serialize)]
struct Item {
    id: String,
    ok: bool,
    error: Option<String>,
}

fn summary(items: &[Item]) -> Result<Report> {
    let failures = items.iter().filter(|i| !i.ok).count();
    Report::table(items, json!({ "processed": items.len(), "failed": failures }), failures)
}

/// Writes every readable program as one record to `--out`, with the ids in
/// a `<out>.json` sidecar.
pub fn encode(args: &EncodeArgs, ctx: &Ctx) -> Result<Report> {
    let input = ctx.input(&args.input)?;
    let out = ctx.out.clone().ok_or_else(|| config_error("encode needs --out FILE"))?;
    let mut items = Vec::new();
    let mut records = Vec::new();
    let mut ids = Vec::new();
    for l in load_programs(&input)? {
        match l.program.and_then(|p| to_matrix(&p).map_err(|e| e.to_string())) {
            Ok(m) => {
                records.push(m);
                ids.push(l.id.clone());
                items.push(Item { id: l.id, ok: true, error: None });
            }
            Err(e) => {
                log::warn!("{}: {e}", l.id);
                items.push(Item { id: l.id, ok: false, error: Some(e) });
            }
        }
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&out, write_records(&records)).with_context(|| format!("writing {}", out.display()))?;
    let side = json!({ "run": ctx.run.to_json(), "ids": ids });
    std::fs::write(sidecar_path(&out), serde_json::to_string_pretty(&side)? + "\n")?;
    summary(&items)
}

/// Writes each record of a binary matrix file as canonical program JSON.
pub fn decode(args: &DecodeArgs, ctx: &Ctx) -> Result<Report> {
    let dir = ctx.out_dir()?;
    let bytes = std::fs::read(&args.input).map_err(|e| config_error(format!("{}: {e}", args.input.display())))?;
    let records = read_records(&bytes).map_err(|e| config_error(format!("{}: {e}", args.input.display())))?;
    let ids = record_ids(&args.input, records.len());
    let mut items = Vec::with_capacity(records.len());
    for (m, id) in records.iter().zip(ids) {
        match from_matrix(m) {
            Ok(p) => {
                write_item(&dir, &id, ".json", program_to_json(&p).as_bytes())?;
                items.push(Item { id, ok: true, error: None });
            }
            Err(e) => {
                log::warn!("{id}: {e}");
                items.push(Item { id, ok: false, error: Some(e.to_string()) });
            }
        }
    }
    let report = summary(&items)?;
    ctx.run.write_sidecar(&dir, &report.json)?;
    Ok(report)
}
