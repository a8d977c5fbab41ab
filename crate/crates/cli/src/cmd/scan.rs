use std::path::PathBuf;

use anyhow::Result;
use cadseq::cadlang::parse_program;
use cadseq::geom::{compile, sample_surface};
use cadseq::io::{ingest_scan, read_point_cloud, write_ply, write_xyz, PlyEncoding, ScanTarget};
use cadseq::metrics::chamfer_distance_with;
use cadseq::par::derive_seed;
use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::run::{config_error, Report};
use crate::Ctx;

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Scan point cloud (PLY or XYZ).
    #[arg(long)]
    input: PathBuf,
    /// Program whose sampled surface sets the target centroid and scale.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Points kept from the scan.
    #[arg(long, default_value_t = 2048)]
    points: usize,
    /// Points sampled from the reference solid.
    #[arg(long, default_value_t = 4096)]
    reference_points: usize,
}

#[derive(Serialize)]
struct IngestRow {
    id: String,
    input_points: usize,
    output_points: usize,
    diagonal: f64,
    centroid_x: f64,
    centroid_y: f64,
    centroid_z: f64,
    chamfer_to_reference: Option<f64>,
}

pub fn ingest(args: &IngestArgs, ctx: &Ctx) -> Result<Report> {
    let out = ctx.out.clone().ok_or_else(|| config_error("ingest-scan needs --out FILE (.ply or .xyz)"))?;
    let scan = read_point_cloud(&args.input).map_err(|e| config_error(format!("{}: {e}", args.input.display())))?;
    let seed = ctx.run.seed;
    let reference = match &args.reference {
        None => None,
        Some(path) => {
            let bytes = std::fs::read(path)?;
            let program = parse_program(&bytes).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
            let solid = compile(&program).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
            let pc = sample_surface(&solid, args.reference_points, derive_seed(seed, &[1]))
                .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
            Some(pc)
        }
    };
    let target = reference.as_ref().map_or(ScanTarget::UNIT, ScanTarget::of);
    let pc = ingest_scan(&scan, target, args.points, derive_seed(seed, &[0]))
        .map_err(|e| config_error(format!("{}: {e}", args.input.display())))?;
    let is_xyz = out.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("xyz"));
    let bytes =
        if is_xyz { write_xyz(&pc).into_bytes() } else { write_ply(&pc, PlyEncoding::BinaryLittleEndian, &[format!("run {}", ctx.run.line())]) };
    std::fs::write(&out, bytes)?;
    let c = pc.centroid();
    let row = IngestRow {
        id: pc.source_id.clone().unwrap_or_default(),
        input_points: scan.len(),
        output_points: pc.len(),
        diagonal: pc.bbox().diagonal(),
        centroid_x: c[0],
        centroid_y: c[1],
        centroid_z: c[2],
        chamfer_to_reference: reference.as_ref().map(|r| chamfer_distance_with(&pc, r, ctx.exec)),
    };
    Report::table(&[row], json!({ "output": out }), 0)
}
