use rand::Rng;

use crate::geom::{Aabb, SolidModel, P3};
use crate::par::{self, Exec};

use super::MetricError;

/// Proper rotation with entries in {-1, 0, 1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rotation(pub [[i8; 3]; 3]);

impl Rotation {
    pub const IDENTITY: Rotation = Rotation([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);

    pub fn apply(&self, p: P3) -> P3 {
        std::array::from_fn(|i| (0..3).map(|j| self.0[i][j] as f64 * p[j]).sum())
    }

    pub fn apply_transpose(&self, p: P3) -> P3 {
        std::array::from_fn(|i| (0..3).map(|j| self.0[j][i] as f64 * p[j]).sum())
    }

    fn det(&self) -> i32 {
        let m = self.0.map(|r| r.map(i32::from));
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// The 24 rotations mapping the coordinate axes onto themselves.
pub fn octahedral_rotations() -> Vec<Rotation> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for perm in PERMS {
        for signs in 0..8u8 {
            let mut m = [[0i8; 3]; 3];
            for (i, &j) in perm.iter().enumerate() {
                m[i][j] = if signs >> i & 1 == 1 { -1 } else { 1 };
            }
            let r = Rotation(m);
            if r.det() == 1 {
                out.push(r);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IouOptions {
    /// Centre on the volume centroid and scale the bounding-box diagonal to 1.
    pub normalize: bool,
    /// Maximize over the octahedral rotations of the second solid.
    pub align: bool,
    pub exec: Exec,
}

impl Default for IouOptions {
    fn default() -> Self {
        IouOptions { normalize: true, align: true, exec: Exec::default() }
    }
}

/// A solid seen through `q -> (q - center) * factor`, then rotated.
#[derive(Clone, Copy)]
struct View<'a> {
    solid: &'a SolidModel,
    center: P3,
    factor: f64,
    rot: Rotation,
}

impl View<'_> {
    fn contains(&self, q: P3) -> bool {
        let p = self.rot.apply_transpose(q);
        self.solid.contains(std::array::from_fn(|k| self.center[k] + p[k] / self.factor))
    }

    fn bbox(&self) -> Aabb {
        let b = self.solid.bbox;
        let mut out = Aabb::EMPTY;
        for c in 0..8 {
            let corner: P3 = std::array::from_fn(|k| if c >> k & 1 == 1 { b.max[k] } else { b.min[k] });
            out = out.grow(self.rot.apply(std::array::from_fn(|k| (corner[k] - self.center[k]) * self.factor)));
        }
        out
    }
}

const CHUNK: usize = 4096;

fn centroid(s: &SolidModel, n: usize, seed: u64) -> Result<P3, MetricError> {
    if s.bbox.is_empty() {
        return Err(MetricError::EmptySolid);
    }
    let ext = s.bbox.extent();
    let mut rng = par::rng_from(seed, &[0xce47]);
    let mut sum = [0.0; 3];
    let mut hits = 0usize;
    for _ in 0..n {
        let q: P3 = std::array::from_fn(|k| s.bbox.min[k] + rng.random::<f64>() * ext[k]);
        if s.contains(q) {
            hits += 1;
            for k in 0..3 {
                sum[k] += q[k];
            }
        }
    }
    if hits == 0 {
        return Err(MetricError::EmptySolid);
    }
    Ok(sum.map(|v| v / hits as f64))
}

fn view<'a>(s: &'a SolidModel, n: usize, seed: u64, normalize: bool) -> Result<View<'a>, MetricError> {
    if !normalize {
        if s.bbox.is_empty() {
            return Err(MetricError::EmptySolid);
        }
        return Ok(View { solid: s, center: [0.0; 3], factor: 1.0, rot: Rotation::IDENTITY });
    }
    let center = centroid(s, n, seed)?;
    let diag = s.bbox.diagonal();
    Ok(View { solid: s, center, factor: 1.0 / diag, rot: Rotation::IDENTITY })
}

/// Monte Carlo IoU over the joint bounding box. The unit-cube draws depend
/// only on `seed`, so every rotation sees the same random numbers.
fn mc_iou(a: &View, b: &View, n: usize, seed: u64, exec: Exec) -> f64 {
    let bx = a.bbox().union(b.bbox());
    let ext = bx.extent();
    let counts = par::map_indexed(exec, n.div_ceil(CHUNK), |c| {
        let mut rng = par::rng_from(seed, &[c as u64]);
        let (mut inter, mut union) = (0usize, 0usize);
        for _ in 0..CHUNK.min(n - c * CHUNK) {
            let q: P3 = std::array::from_fn(|k| bx.min[k] + rng.random::<f64>() * ext[k]);
            let (ia, ib) = (a.contains(q), b.contains(q));
            inter += usize::from(ia && ib);
            union += usize::from(ia || ib);
        }
        (inter, union)
    });
    let (i, u) = counts.into_iter().fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    if u == 0 {
        0.0
    } else {
        i as f64 / u as f64
    }
}

/// IoU of `s1` against each candidate rotation of `s2` (only the identity
/// when alignment is off), in [`octahedral_rotations`] order.
pub fn iou_per_rotation(
    s1: &SolidModel,
    s2: &SolidModel,
    n: usize,
    seed: u64,
    opts: IouOptions,
) -> Result<Vec<f64>, MetricError> {
    let a = view(s1, n, par::derive_seed(seed, &[1]), opts.normalize)?;
    let b = view(s2, n, par::derive_seed(seed, &[2]), opts.normalize)?;
    let rotations = if opts.align { octahedral_rotations() } else { vec![Rotation::IDENTITY] };
    let mc_seed = par::derive_seed(seed, &[3]);
    if rotations.len() == 1 {
        return Ok(vec![mc_iou(&a, &b, n, mc_seed, opts.exec)]);
    }
    Ok(par::map_slice(opts.exec, &rotations, |&rot| {
        let rb = View { rot, ..b };
        mc_iou(&a, &rb, n, mc_seed, Exec::Sequential)
    }))
}

/// Best IoU over the alignment search.
pub fn iou_aligned(s1: &SolidModel, s2: &SolidModel, n: usize, seed: u64, opts: IouOptions) -> Result<f64, MetricError> {
    Ok(iou_per_rotation(s1, s2, n, seed, opts)?.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_four_distinct_rotations() {
        let r = octahedral_rotations();
        assert_eq!(r.len(), 24);
        for (i, a) in r.iter().enumerate() {
            assert!(r[i + 1..].iter().all(|b| a != b));
            let p = [0.3, -1.7, 2.9];
            assert_eq!(a.apply_transpose(a.apply(p)), p);
        }
    }
}
