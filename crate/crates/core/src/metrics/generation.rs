use std::collections::BTreeSet;

use serde::Serialize;

use crate::geom::PointCloud;
use crate::par::{self, Exec};

use super::{chamfer_distance, MetricError};

/// Voxels per axis over `[-1, 1]^3`.
pub const JSD_GRID: usize = 28;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenerationQuality {
    pub jsd: f64,
    pub cov: f64,
    pub mmd: f64,
}

fn voxel(v: f64, grid: usize) -> usize {
    let t = ((v + 1.0) / 2.0 * grid as f64).floor();
    t.clamp(0.0, (grid - 1) as f64) as usize
}

/// Per-voxel count of clouds with at least one point in the voxel,
/// normalized to a distribution. Points outside the box land in the
/// nearest boundary voxel.
fn occupancy(set: &[PointCloud], grid: usize) -> Vec<f64> {
    let mut counts = vec![0.0; grid * grid * grid];
    for pc in set {
        let cells: BTreeSet<usize> = pc
            .points
            .iter()
            .map(|p| (voxel(p[0], grid) * grid + voxel(p[1], grid)) * grid + voxel(p[2], grid))
            .collect();
        for c in cells {
            counts[c] += 1.0;
        }
    }
    let total: f64 = counts.iter().sum();
    if total > 0.0 {
        counts.iter_mut().for_each(|c| *c /= total);
    }
    counts
}

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Jensen-Shannon divergence (natural log) of two distributions.
fn jsd(p: &[f64], q: &[f64]) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a + b) / 2.0).collect();
    (entropy(&m) - (entropy(p) + entropy(q)) / 2.0).max(0.0)
}

/// JSD of voxel occupancy, coverage (share of reference clouds that are the
/// chamfer-nearest reference of some generated cloud) and minimum matching
/// distance (mean over references of the chamfer distance to the nearest
/// generated cloud). Chamfer ties resolve to the lowest index.
pub fn generation_quality(gen: &[PointCloud], refs: &[PointCloud]) -> Result<GenerationQuality, MetricError> {
    generation_quality_with(gen, refs, JSD_GRID, Exec::default())
}

pub fn generation_quality_with(
    gen: &[PointCloud],
    refs: &[PointCloud],
    grid: usize,
    exec: Exec,
) -> Result<GenerationQuality, MetricError> {
    if gen.is_empty() || refs.is_empty() || gen.iter().chain(refs).any(PointCloud::is_empty) {
        return Err(MetricError::EmptyInput);
    }
    let jsd = jsd(&occupancy(gen, grid), &occupancy(refs, grid));
    // dist[g][r]
    let dist: Vec<Vec<f64>> = par::map_slice(exec, gen, |g| refs.iter().map(|r| chamfer_distance(g, r)).collect());
    let argmin = |row: &[f64]| (0..row.len()).fold(0, |best, i| if row[i] < row[best] { i } else { best });
    let matched: BTreeSet<usize> = dist.iter().map(|row| argmin(row)).collect();
    let cov = matched.len() as f64 / refs.len() as f64;
    let mmd = (0..refs.len())
        .map(|r| dist.iter().map(|row| row[r]).fold(f64::INFINITY, f64::min))
        .sum::<f64>()
        / refs.len() as f64;
    Ok(GenerationQuality { jsd, cov, mmd })
}
