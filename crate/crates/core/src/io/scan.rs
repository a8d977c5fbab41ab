use rand::seq::index::sample;

use crate::geom::{PointCloud, P3};
use crate::par;

use super::FormatError;

/// Where a normalized scan should land.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanTarget {
    pub center: P3,
    pub diagonal: f64,
}

impl ScanTarget {
    /// Centred at the origin with unit bounding-box diagonal.
    pub const UNIT: ScanTarget = ScanTarget { center: [0.0; 3], diagonal: 1.0 };

    /// Centroid and bounding-box diagonal of a reference cloud.
    pub fn of(reference: &PointCloud) -> ScanTarget {
        ScanTarget { center: reference.centroid(), diagonal: reference.bbox().diagonal() }
    }
}

/// Subsamples `scan` to `count` points without replacement (all points when
/// it has fewer), then moves its centroid to the target centre and scales
/// its bounding-box diagonal to the target diagonal. Normals are
/// re-normalized.
pub fn ingest_scan(scan: &PointCloud, target: ScanTarget, count: usize, seed: u64) -> Result<PointCloud, FormatError> {
    if scan.is_empty() || count == 0 {
        return Err(FormatError::Empty);
    }
    let keep: Vec<usize> = if count < scan.len() {
        let mut v = sample(&mut par::rng_from(seed, &[]), scan.len(), count).into_vec();
        v.sort_unstable();
        v
    } else {
        (0..scan.len()).collect()
    };
    let sub = PointCloud {
        points: keep.iter().map(|&i| scan.points[i]).collect(),
        normals: scan.normals.as_ref().map(|n| keep.iter().map(|&i| n[i]).collect()),
        seed: Some(seed),
        source_id: scan.source_id.clone(),
    };
    let diag = sub.bbox().diagonal();
    if diag.is_nan() || diag <= 0.0 {
        return Err(super::malformed("scan has zero extent"));
    }
    let c = sub.centroid();
    let f = target.diagonal / diag;
    let mut out = sub.recentered(c, f);
    for p in &mut out.points {
        for (x, c) in p.iter_mut().zip(target.center) {
            *x += c;
        }
    }
    if let Some(ns) = &mut out.normals {
        for n in ns.iter_mut() {
            let l = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            if l > 0.0 {
                *n = n.map(|x| x / l);
            }
        }
    }
    Ok(out)
}
