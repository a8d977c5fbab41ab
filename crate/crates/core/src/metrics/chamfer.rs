use crate::geom::{PointCloud, P3};
use crate::par::{self, Exec};

/// Reporting multiplier applied to the squared-distance chamfer sum.
pub const CHAMFER_SCALE: f64 = 1000.0;

fn sq(a: &P3, b: &P3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

fn mean_nearest(from: &[P3], to: &[P3], exec: Exec) -> f64 {
    let nearest = par::map_slice(exec, from, |p| to.iter().map(|q| sq(p, q)).fold(f64::INFINITY, f64::min));
    nearest.iter().sum::<f64>() / from.len() as f64
}

/// `1000 * (mean_a min_b |a-b|^2 + mean_b min_a |a-b|^2)`, brute force.
///
/// # Panics
/// If either cloud is empty.
pub fn chamfer_distance(a: &PointCloud, b: &PointCloud) -> f64 {
    chamfer_distance_with(a, b, Exec::Sequential)
}

pub fn chamfer_distance_with(a: &PointCloud, b: &PointCloud, exec: Exec) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "chamfer distance of an empty cloud");
    CHAMFER_SCALE * (mean_nearest(&a.points, &b.points, exec) + mean_nearest(&b.points, &a.points, exec))
}
