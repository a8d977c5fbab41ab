//! Pairwise segment intersection for profile self-intersection checks.

use super::profile::{cross, dist, dot, norm, sub, Profile, Segment, P2, TOL};

/// Intersection points closer than this to a shared vertex of adjacent
/// segments are the vertex itself.
const VERTEX_TOL: f64 = 1e-6;

enum Hit {
    Points(Vec<P2>),
    /// The two curves share a stretch of positive length.
    Overlap,
}

fn line_line(a: P2, b: P2, c: P2, d: P2) -> Hit {
    let d1 = sub(b, a);
    let d2 = sub(d, c);
    let (l1, l2) = (norm(d1), norm(d2));
    let denom = cross(d1, d2);
    let ac = sub(c, a);
    if denom.abs() <= 1e-12 * l1 * l2 {
        if cross(d1, ac).abs() / l1 > TOL {
            return Hit::Points(vec![]);
        }
        let tc = dot(ac, d1) / (l1 * l1);
        let td = dot(sub(d, a), d1) / (l1 * l1);
        let lo = tc.min(td).max(0.0);
        let hi = tc.max(td).min(1.0);
        if (hi - lo) * l1 > TOL {
            return Hit::Overlap;
        }
        if hi - lo >= -TOL / l1 {
            let t = lo.clamp(0.0, 1.0);
            return Hit::Points(vec![[a[0] + t * d1[0], a[1] + t * d1[1]]]);
        }
        return Hit::Points(vec![]);
    }
    let t = cross(ac, d2) / denom;
    let u = cross(ac, d1) / denom;
    let (ta, tb) = (TOL / l1, TOL / l2);
    if t >= -ta && t <= 1.0 + ta && u >= -tb && u <= 1.0 + tb {
        Hit::Points(vec![[a[0] + t * d1[0], a[1] + t * d1[1]]])
    } else {
        Hit::Points(vec![])
    }
}

/// Points where segment `a`-`b` meets the circle.
fn line_circle(a: P2, b: P2, center: P2, r: f64) -> Vec<P2> {
    let d = sub(b, a);
    let l = norm(d);
    let u = [d[0] / l, d[1] / l];
    let ac = sub(center, a);
    let along = dot(ac, u);
    let off = cross(u, ac).abs();
    if off > r + TOL {
        return vec![];
    }
    let half = if off >= r - TOL { 0.0 } else { (r * r - off * off).sqrt() };
    let mut out = Vec::with_capacity(2);
    for s in if half == 0.0 { vec![along] } else { vec![along - half, along + half] } {
        if s >= -TOL && s <= l + TOL {
            out.push([a[0] + s * u[0], a[1] + s * u[1]]);
        }
    }
    out
}

/// Circle/circle points, or `None` for coincident circles.
fn circle_circle(c1: P2, r1: f64, c2: P2, r2: f64) -> Option<Vec<P2>> {
    let d = dist(c1, c2);
    if d < TOL && (r1 - r2).abs() < TOL {
        return None;
    }
    if d > r1 + r2 + TOL || d < (r1 - r2).abs() - TOL || d < TOL {
        return Some(vec![]);
    }
    let e = [(c2[0] - c1[0]) / d, (c2[1] - c1[1]) / d];
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h2 = r1 * r1 - a * a;
    let base = [c1[0] + a * e[0], c1[1] + a * e[1]];
    if h2 <= (TOL * r1.max(1.0)).powi(2) {
        return Some(vec![base]);
    }
    let h = h2.sqrt();
    Some(vec![[base[0] - h * e[1], base[1] + h * e[0]], [base[0] + h * e[1], base[1] - h * e[0]]])
}

struct CurveView {
    center: P2,
    radius: f64,
    /// Counter-clockwise interval `[start, start + len]`; `len = 2 pi` for
    /// full circles.
    start: f64,
    len: f64,
}

fn curve_view(s: &Segment) -> Option<CurveView> {
    match *s {
        Segment::Line { .. } => None,
        Segment::Circle { center, radius } => {
            Some(CurveView { center, radius, start: 0.0, len: std::f64::consts::TAU })
        }
        Segment::Arc { center, radius, start_angle, sweep, .. } => Some(CurveView {
            center,
            radius,
            start: if sweep > 0.0 { start_angle } else { start_angle + sweep },
            len: sweep.abs(),
        }),
    }
}

impl CurveView {
    fn holds(&self, p: P2) -> bool {
        let v = sub(p, self.center);
        Segment::arc_contains_angle(self.start, self.len, v[1].atan2(v[0]), TOL / self.radius)
    }

    /// Length of the overlap between two intervals on the same circle.
    fn overlap(&self, o: &CurveView) -> f64 {
        use std::f64::consts::TAU;
        let mut best: f64 = 0.0;
        for shift in [-TAU, 0.0, TAU] {
            let s = o.start + shift;
            let lo = self.start.max(s);
            let hi = (self.start + self.len).min(s + o.len);
            best = best.max(hi - lo);
        }
        // A full circle overlaps a neighbour across the 0/2pi seam as well.
        if self.len >= std::f64::consts::TAU - 1e-12 {
            best = best.max(o.len);
        }
        if o.len >= std::f64::consts::TAU - 1e-12 {
            best = best.max(self.len);
        }
        best
    }

    fn endpoints(&self) -> Vec<P2> {
        [self.start, self.start + self.len]
            .iter()
            .map(|t| [self.center[0] + self.radius * t.cos(), self.center[1] + self.radius * t.sin()])
            .collect()
    }
}

fn hit(s1: &Segment, s2: &Segment) -> Hit {
    match (s1, s2) {
        (Segment::Line { a, b }, Segment::Line { a: c, b: d }) => line_line(*a, *b, *c, *d),
        (Segment::Line { a, b }, other) | (other, Segment::Line { a, b }) => {
            let cv = curve_view(other).expect("curved segment");
            Hit::Points(
                line_circle(*a, *b, cv.center, cv.radius).into_iter().filter(|p| cv.holds(*p)).collect(),
            )
        }
        _ => {
            let (v1, v2) = (curve_view(s1).unwrap(), curve_view(s2).unwrap());
            match circle_circle(v1.center, v1.radius, v2.center, v2.radius) {
                Some(pts) => Hit::Points(pts.into_iter().filter(|p| v1.holds(*p) && v2.holds(*p)).collect()),
                None => {
                    if v1.overlap(&v2) * v1.radius > TOL {
                        Hit::Overlap
                    } else {
                        let mut pts: Vec<P2> =
                            v1.endpoints().into_iter().filter(|p| v2.holds(*p)).collect();
                        pts.extend(v2.endpoints().into_iter().filter(|p| v1.holds(*p)));
                        Hit::Points(pts)
                    }
                }
            }
        }
    }
}

/// Whether two segments meet anywhere other than the listed shared vertices.
pub fn segments_intersect(s1: &Segment, s2: &Segment, shared: &[P2]) -> bool {
    match hit(s1, s2) {
        Hit::Overlap => true,
        Hit::Points(pts) => pts.iter().any(|p| shared.iter().all(|v| dist(*p, *v) > VERTEX_TOL)),
    }
}

/// True iff any two non-adjacent segments of the profile (within a loop or
/// across loops) intersect, or two adjacent segments meet anywhere beyond
/// their shared vertex.
pub fn check_self_intersection(profile: &Profile) -> bool {
    let segs: Vec<(usize, usize, &Segment)> = profile
        .loops
        .iter()
        .enumerate()
        .flat_map(|(li, l)| l.segments.iter().enumerate().map(move |(si, s)| (li, si, s)))
        .collect();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (li, si, s1) = segs[i];
            let (lj, sj, s2) = segs[j];
            let mut shared = Vec::with_capacity(2);
            if li == lj {
                let n = profile.loops[li].segments.len();
                if sj == si + 1 {
                    shared.push(s1.end());
                }
                if si == 0 && sj == n - 1 {
                    shared.push(s1.start());
                }
            }
            if segments_intersect(s1, s2, &shared) {
                return true;
            }
        }
    }
    false
}
