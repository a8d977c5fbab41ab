//! Boundary sampling with normals, and Monte Carlo volume.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::par::{self, Exec};

use super::profile::Segment;
use super::solid::{add3, scale3, sub3, SolidModel, P3};
use super::{PointCloud, SamplingError};

/// Candidate draws allowed per requested point before giving up.
pub const OVERSAMPLING_BUDGET: usize = 20;
/// Offset used to decide which side of a candidate is inside the result.
const SIDE_EPS: f64 = 1e-6;
const CAP_TRIES: usize = 64;

#[derive(Clone, Copy, Debug)]
enum PatchKind {
    Wall { loop_idx: usize, seg_idx: usize },
    Cap { top: bool },
}

#[derive(Clone, Copy, Debug)]
struct Patch {
    term: usize,
    kind: PatchKind,
}

struct PatchTable {
    patches: Vec<Patch>,
    cumulative: Vec<f64>,
}

impl PatchTable {
    fn new(s: &SolidModel) -> PatchTable {
        let mut patches = Vec::new();
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        for (ti, t) in s.terms.iter().enumerate() {
            let e = &t.solid;
            let mut push = |kind, area: f64| {
                if area > 0.0 {
                    total += area;
                    patches.push(Patch { term: ti, kind });
                    cumulative.push(total);
                }
            };
            for (li, l) in e.profile.loops.iter().enumerate() {
                for (si, seg) in l.segments.iter().enumerate() {
                    push(PatchKind::Wall { loop_idx: li, seg_idx: si }, seg.length() * e.scale * e.thickness());
                }
            }
            let cap = e.profile.area() * e.scale * e.scale;
            push(PatchKind::Cap { top: false }, cap);
            push(PatchKind::Cap { top: true }, cap);
        }
        PatchTable { patches, cumulative }
    }

    fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn pick(&self, rng: &mut ChaCha8Rng) -> Patch {
        let x = rng.random::<f64>() * self.total();
        let i = self.cumulative.partition_point(|&c| c <= x).min(self.patches.len() - 1);
        self.patches[i]
    }
}

/// A point on one term's surface with that term's outward normal.
fn draw_candidate(s: &SolidModel, patch: Patch, rng: &mut ChaCha8Rng) -> Option<(P3, P3)> {
    let e = &s.terms[patch.term].solid;
    let f = &e.frame;
    match patch.kind {
        PatchKind::Wall { loop_idx, seg_idx } => {
            let seg: &Segment = &e.profile.loops[loop_idx].segments[seg_idx];
            let t = rng.random::<f64>();
            let h = e.lo + rng.random::<f64>() * e.thickness();
            let (p2, rn) = seg.point_and_right_normal(t);
            let sign = e.profile.outward_sign(loop_idx);
            let p = f.to_world(p2[0] * e.scale, p2[1] * e.scale, h);
            let n = add3(scale3(f.x_axis, rn[0] * sign), scale3(f.y_axis, rn[1] * sign));
            Some((p, n))
        }
        PatchKind::Cap { top } => {
            let [lo, hi] = e.profile.bbox();
            for _ in 0..CAP_TRIES {
                let u = lo[0] + rng.random::<f64>() * (hi[0] - lo[0]);
                let v = lo[1] + rng.random::<f64>() * (hi[1] - lo[1]);
                if e.profile.parity([u, v]) {
                    let (h, n) = if top { (e.hi, f.normal) } else { (e.lo, scale3(f.normal, -1.0)) };
                    return Some((f.to_world(u * e.scale, v * e.scale, h), n));
                }
            }
            None
        }
    }
}

fn unit(v: P3) -> P3 {
    let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    scale3(v, 1.0 / l)
}

/// Samples `n` points approximately uniformly over the boundary of the CSG
/// result, each with the outward unit normal of its source face (flipped
/// for faces exposed by a cut). Candidates are drawn area-weighted from all
/// terms' surfaces and kept when the final solid is inside on one side and
/// outside on the other.
pub fn sample_surface(s: &SolidModel, n: usize, seed: u64) -> Result<PointCloud, SamplingError> {
    let table = PatchTable::new(s);
    if table.patches.is_empty() || n == 0 {
        return Err(SamplingError { requested: n, found: 0 });
    }
    let mut rng = par::rng_from(seed, &[]);
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let budget = OVERSAMPLING_BUDGET * n;
    let mut attempts = 0;
    while points.len() < n {
        if attempts >= budget {
            return Err(SamplingError { requested: n, found: points.len() });
        }
        attempts += 1;
        let Some((p, nrm)) = draw_candidate(s, table.pick(&mut rng), &mut rng) else {
            continue;
        };
        let inner = s.contains(sub3(p, scale3(nrm, SIDE_EPS)));
        let outer = s.contains(add3(p, scale3(nrm, SIDE_EPS)));
        let normal = match (inner, outer) {
            (true, false) => nrm,
            (false, true) => scale3(nrm, -1.0),
            _ => continue,
        };
        points.push(p);
        normals.push(unit(normal));
    }
    Ok(PointCloud { points, normals: Some(normals), seed: Some(seed), source_id: None })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeEstimate {
    pub volume: f64,
    pub std_error: f64,
    pub hits: usize,
    pub samples: usize,
}

const MC_CHUNK: usize = 4096;

/// `bbox volume * hits / n` with its binomial standard error.
pub fn monte_carlo_volume(s: &SolidModel, n: usize, seed: u64) -> VolumeEstimate {
    monte_carlo_volume_with(s, n, seed, Exec::default())
}

pub fn monte_carlo_volume_with(s: &SolidModel, n: usize, seed: u64, exec: Exec) -> VolumeEstimate {
    let bv = s.bbox.volume();
    if n == 0 || s.bbox.is_empty() || bv <= 0.0 {
        return VolumeEstimate { volume: 0.0, std_error: 0.0, hits: 0, samples: n };
    }
    let chunks = n.div_ceil(MC_CHUNK);
    let ext = s.bbox.extent();
    let hits: usize = par::map_indexed(exec, chunks, |c| {
        let mut rng = par::rng_from(seed, &[c as u64]);
        let count = MC_CHUNK.min(n - c * MC_CHUNK);
        (0..count)
            .filter(|_| {
                let q = [
                    s.bbox.min[0] + rng.random::<f64>() * ext[0],
                    s.bbox.min[1] + rng.random::<f64>() * ext[1],
                    s.bbox.min[2] + rng.random::<f64>() * ext[2],
                ];
                s.contains(q)
            })
            .count()
    })
    .into_iter()
    .sum();
    let frac = hits as f64 / n as f64;
    VolumeEstimate {
        volume: bv * frac,
        std_error: bv * (frac * (1.0 - frac) / n as f64).sqrt(),
        hits,
        samples: n,
    }
}
