//! Dequantized 2D sketch profiles: closed loops of lines, arcs and circles,
//! with even-odd membership, exact area, and boundary distance.

use std::f64::consts::{PI, TAU};

use crate::cadlang::quant::{dequantize_u8, ParamKind};
use crate::cadlang::{CadProgram, Command, LoopSpan};

use super::CompileError;

pub type P2 = [f64; 2];

/// Classification and closure tolerance in normalized units.
pub const TOL: f64 = 1e-9;

#[inline]
pub(crate) fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}
#[inline]
pub(crate) fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
#[inline]
pub(crate) fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
#[inline]
pub(crate) fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}
#[inline]
pub(crate) fn dist(a: P2, b: P2) -> f64 {
    norm(sub(a, b))
}

/// `(angle - start)` wrapped to `[0, 2 pi)`.
#[inline]
pub(crate) fn wrap_from(angle: f64, start: f64) -> f64 {
    (angle - start).rem_euclid(TAU)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Segment {
    Line { a: P2, b: P2 },
    /// Arc from `a` to `b` around `center`; `sweep` is signed, positive for
    /// counter-clockwise traversal.
    Arc { a: P2, b: P2, center: P2, radius: f64, start_angle: f64, sweep: f64 },
    Circle { center: P2, radius: f64 },
}

impl Segment {
    /// Arc through `a` and `b` with unsigned sweep in `(0, 2 pi)`.
    pub fn arc(a: P2, b: P2, sweep: f64, ccw: bool) -> Option<Segment> {
        let chord = sub(b, a);
        let c = norm(chord);
        if c < TOL || sweep <= 0.0 || sweep >= TAU {
            return None;
        }
        let half = sweep / 2.0;
        let radius = c / (2.0 * half.sin());
        let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        let left = [-chord[1] / c, chord[0] / c];
        // Signed offset of the center from the chord midpoint along the left normal.
        let off = (c / 2.0) / half.tan() * if ccw { 1.0 } else { -1.0 };
        let center = [mid[0] + left[0] * off, mid[1] + left[1] * off];
        let start_angle = (a[1] - center[1]).atan2(a[0] - center[0]);
        Some(Segment::Arc {
            a,
            b,
            center,
            radius,
            start_angle,
            sweep: if ccw { sweep } else { -sweep },
        })
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { a, b } => dist(a, b),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
            Segment::Circle { radius, .. } => TAU * radius,
        }
    }

    pub fn start(&self) -> P2 {
        match *self {
            Segment::Line { a, .. } | Segment::Arc { a, .. } => a,
            Segment::Circle { center, radius } => [center[0] + radius, center[1]],
        }
    }

    pub fn end(&self) -> P2 {
        match *self {
            Segment::Line { b, .. } | Segment::Arc { b, .. } => b,
            Segment::Circle { .. } => self.start(),
        }
    }

    /// Point at parameter `t` in `[0, 1]` along the traversal, with the unit
    /// normal on the right of the traversal direction.
    pub fn point_and_right_normal(&self, t: f64) -> (P2, P2) {
        match *self {
            Segment::Line { a, b } => {
                let d = sub(b, a);
                let l = norm(d);
                ([a[0] + t * d[0], a[1] + t * d[1]], [d[1] / l, -d[0] / l])
            }
            Segment::Arc { center, radius, start_angle, sweep, .. } => {
                let phi = start_angle + t * sweep;
                let (s, c) = phi.sin_cos();
                let sign = sweep.signum();
                ([center[0] + radius * c, center[1] + radius * s], [sign * c, sign * s])
            }
            Segment::Circle { center, radius } => {
                let (s, c) = (t * TAU).sin_cos();
                ([center[0] + radius * c, center[1] + radius * s], [c, s])
            }
        }
    }

    /// Green's-theorem contribution `1/2 * integral of (x dy - y dx)`.
    fn signed_area_term(&self) -> f64 {
        match *self {
            Segment::Line { a, b } => 0.5 * cross(a, b),
            Segment::Arc { center, radius, start_angle, sweep, .. } => {
                let (s0, c0) = start_angle.sin_cos();
                let (s1, c1) = (start_angle + sweep).sin_cos();
                0.5 * (radius * radius * sweep + radius * center[0] * (s1 - s0)
                    - radius * center[1] * (c1 - c0))
            }
            Segment::Circle { radius, .. } => PI * radius * radius,
        }
    }

    /// Whether the angle of `p` around an arc's center falls in its span.
    pub(crate) fn arc_contains_angle(start_angle: f64, sweep: f64, angle: f64, tol: f64) -> bool {
        let rel = if sweep > 0.0 { wrap_from(angle, start_angle) } else { wrap_from(start_angle, angle) };
        rel <= sweep.abs() + tol || rel >= TAU - tol
    }

    pub fn distance(&self, p: P2) -> f64 {
        match *self {
            Segment::Line { a, b } => {
                let d = sub(b, a);
                let t = (dot(sub(p, a), d) / dot(d, d)).clamp(0.0, 1.0);
                dist(p, [a[0] + t * d[0], a[1] + t * d[1]])
            }
            Segment::Arc { a, b, center, radius, start_angle, sweep } => {
                let v = sub(p, center);
                let ang = v[1].atan2(v[0]);
                if Self::arc_contains_angle(start_angle, sweep, ang, 0.0) {
                    (norm(v) - radius).abs()
                } else {
                    dist(p, a).min(dist(p, b))
                }
            }
            Segment::Circle { center, radius } => (dist(p, center) - radius).abs(),
        }
    }

    fn bbox(&self) -> [P2; 2] {
        match *self {
            Segment::Line { a, b } => {
                [[a[0].min(b[0]), a[1].min(b[1])], [a[0].max(b[0]), a[1].max(b[1])]]
            }
            Segment::Arc { a, b, center, radius, start_angle, sweep } => {
                let mut lo = [a[0].min(b[0]), a[1].min(b[1])];
                let mut hi = [a[0].max(b[0]), a[1].max(b[1])];
                for k in 0..4 {
                    let ang = k as f64 * PI / 2.0;
                    if Self::arc_contains_angle(start_angle, sweep, ang, 0.0) {
                        let q = [center[0] + radius * ang.cos(), center[1] + radius * ang.sin()];
                        lo = [lo[0].min(q[0]), lo[1].min(q[1])];
                        hi = [hi[0].max(q[0]), hi[1].max(q[1])];
                    }
                }
                [lo, hi]
            }
            Segment::Circle { center, radius } => [
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ],
        }
    }
}

/// A closed loop of segments. `commands` is the index range of its curve
/// commands in the source program.
#[derive(Clone, Debug, PartialEq)]
pub struct Loop {
    pub segments: Vec<Segment>,
    pub commands: std::ops::Range<usize>,
    signed_area: f64,
}

impl Loop {
    pub fn new(segments: Vec<Segment>, commands: std::ops::Range<usize>) -> Loop {
        let signed_area = segments.iter().map(Segment::signed_area_term).sum();
        Loop { segments, commands, signed_area }
    }

    /// Positive for counter-clockwise loops.
    pub fn signed_area(&self) -> f64 {
        self.signed_area
    }

    pub fn is_closed(&self) -> bool {
        let (first, last) = (&self.segments[0], &self.segments[self.segments.len() - 1]);
        dist(last.end(), first.start()) <= 1e-6
    }

    /// Even-odd parity of `p` with respect to this loop: parity of the chord
    /// polygon XOR parity of each arc's circular segment.
    pub fn parity(&self, p: P2) -> bool {
        if let [Segment::Circle { center, radius }] = self.segments.as_slice() {
            return dist(p, *center) < *radius;
        }
        let mut inside = false;
        for s in &self.segments {
            let (a, b) = (s.start(), s.end());
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
            if let Segment::Arc { center, radius, start_angle, sweep, .. } = *s {
                if dist(p, center) < radius {
                    // Same side of the chord as the arc midpoint.
                    let mid_ang = start_angle + sweep / 2.0;
                    let m = [center[0] + radius * mid_ang.cos(), center[1] + radius * mid_ang.sin()];
                    let chord = sub(b, a);
                    if cross(chord, sub(p, a)) * cross(chord, sub(m, a)) > 0.0 {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    pub fn distance(&self, p: P2) -> f64 {
        self.segments.iter().map(|s| s.distance(p)).fold(f64::INFINITY, f64::min)
    }

    /// A point on the loop, used for nesting-depth tests.
    fn probe(&self) -> P2 {
        self.segments[0].point_and_right_normal(0.5).0
    }
}

/// A sketch profile: one or more loops combined with even-odd parity.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub loops: Vec<Loop>,
    /// Per loop, +1 if the region lies on the right-normal side's opposite
    /// (i.e. the right normal points outward), -1 otherwise.
    outward_sign: Vec<f64>,
    area: f64,
    bbox: [P2; 2],
}

impl Profile {
    pub fn new(loops: Vec<Loop>) -> Profile {
        let mut outward_sign = Vec::with_capacity(loops.len());
        let mut area = 0.0;
        for (i, l) in loops.iter().enumerate() {
            let probe = l.probe();
            let depth = loops
                .iter()
                .enumerate()
                .filter(|&(j, o)| j != i && o.parity(probe))
                .count();
            let hole = depth % 2 == 1;
            let orient = l.signed_area().signum();
            outward_sign.push(if hole { -orient } else { orient });
            area += if hole { -l.signed_area().abs() } else { l.signed_area().abs() };
        }
        let mut bbox = [[f64::INFINITY; 2], [f64::NEG_INFINITY; 2]];
        for s in loops.iter().flat_map(|l| &l.segments) {
            let [lo, hi] = s.bbox();
            bbox = [
                [bbox[0][0].min(lo[0]), bbox[0][1].min(lo[1])],
                [bbox[1][0].max(hi[0]), bbox[1][1].max(hi[1])],
            ];
        }
        Profile { loops, outward_sign, area, bbox }
    }

    /// Region area (holes subtracted), assuming non-overlapping loops.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn bbox(&self) -> [P2; 2] {
        self.bbox
    }

    pub(crate) fn outward_sign(&self, loop_idx: usize) -> f64 {
        self.outward_sign[loop_idx]
    }

    /// Strict even-odd membership (no boundary tolerance).
    pub fn parity(&self, p: P2) -> bool {
        self.loops.iter().fold(false, |acc, l| acc ^ l.parity(p))
    }

    pub fn boundary_distance(&self, p: P2) -> f64 {
        self.loops.iter().map(|l| l.distance(p)).fold(f64::INFINITY, f64::min)
    }

    /// Membership with ties (within `tol` of the boundary) counted as inside.
    pub fn contains(&self, p: P2, tol: f64) -> bool {
        let [lo, hi] = self.bbox;
        if p[0] < lo[0] - tol || p[1] < lo[1] - tol || p[0] > hi[0] + tol || p[1] > hi[1] + tol {
            return false;
        }
        self.parity(p) || self.boundary_distance(p) <= tol
    }

    pub fn segments(&self) -> impl Iterator<Item = (usize, &Segment)> {
        self.loops.iter().enumerate().flat_map(|(i, l)| l.segments.iter().map(move |s| (i, s)))
    }
}

fn coord(v: u8) -> f64 {
    dequantize_u8(v, ParamKind::Coordinate)
}

/// Builds a loop from its curve commands. Each Line/Arc stores its end point;
/// its start is the previous curve's end, and the first curve starts at the
/// last curve's end. A Circle must be the only curve of its loop.
pub fn build_loop(p: &CadProgram, span: &LoopSpan) -> Result<Loop, CompileError> {
    let cmds = &p.commands[span.curves.clone()];
    let last_idx = span.curves.end - 1;
    let degenerate = |index: usize, reason: &str| CompileError::DegenerateLoop { index, reason: reason.into() };
    if let [Command::Circle { x, y, r }] = cmds {
        let radius = dequantize_u8(*r, ParamKind::Radius);
        if radius <= TOL {
            return Err(degenerate(span.curves.start, "zero-radius circle"));
        }
        return Ok(Loop::new(
            vec![Segment::Circle { center: [coord(*x), coord(*y)], radius }],
            span.curves.clone(),
        ));
    }
    let end_of = |c: &Command| -> Option<P2> {
        match *c {
            Command::Line { x, y } | Command::Arc { x, y, .. } => Some([coord(x), coord(y)]),
            _ => None,
        }
    };
    let mut prev = match cmds.last().and_then(end_of) {
        Some(pt) => pt,
        None => return Err(CompileError::OpenLoop { index: last_idx }),
    };
    let mut segments = Vec::with_capacity(cmds.len());
    for (k, c) in cmds.iter().enumerate() {
        let index = span.curves.start + k;
        let b = end_of(c).ok_or(CompileError::OpenLoop { index: last_idx })?;
        if dist(prev, b) < TOL {
            return Err(degenerate(index, "zero-length curve"));
        }
        let seg = match *c {
            Command::Arc { sweep, ccw, .. } => {
                Segment::arc(prev, b, dequantize_u8(sweep, ParamKind::Sweep), ccw)
                    .ok_or_else(|| degenerate(index, "zero-sweep arc"))?
            }
            _ => Segment::Line { a: prev, b },
        };
        segments.push(seg);
        prev = b;
    }
    let lp = Loop::new(segments, span.curves.clone());
    if !lp.is_closed() {
        return Err(CompileError::OpenLoop { index: last_idx });
    }
    if lp.signed_area().abs() < 1e-12 {
        return Err(degenerate(last_idx, "zero-area loop"));
    }
    Ok(lp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(h: f64) -> Loop {
        let pts = [[-h, -h], [h, -h], [h, h], [-h, h]];
        Loop::new(
            (0..4).map(|i| Segment::Line { a: pts[i], b: pts[(i + 1) % 4] }).collect(),
            0..4,
        )
    }

    #[test]
    fn square_area_and_parity() {
        let l = square(0.5);
        assert!((l.signed_area() - 1.0).abs() < 1e-15);
        assert!(l.parity([0.0, 0.0]));
        assert!(!l.parity([0.6, 0.0]));
        assert!(l.is_closed());
    }

    #[test]
    fn square_with_circle_hole() {
        let hole = Loop::new(vec![Segment::Circle { center: [0.0, 0.0], radius: 0.25 }], 5..6);
        let p = Profile::new(vec![square(0.5), hole]);
        assert!((p.area() - (1.0 - PI / 16.0)).abs() < 1e-12);
        assert!(!p.parity([0.0, 0.0]));
        assert!(p.parity([0.4, 0.4]));
        assert_eq!(p.outward_sign(0), 1.0);
        assert_eq!(p.outward_sign(1), -1.0);
    }

    #[test]
    fn semicircle_d_shape() {
        // Line from (1,0) to (-1,0) then ccw half-turn back to (1,0) below.
        let line = Segment::Line { a: [1.0, 0.0], b: [-1.0, 0.0] };
        let arc = Segment::arc([-1.0, 0.0], [1.0, 0.0], PI, true).unwrap();
        if let Segment::Arc { center, radius, .. } = arc {
            assert!(dist(center, [0.0, 0.0]) < 1e-12);
            assert!((radius - 1.0).abs() < 1e-12);
        }
        let l = Loop::new(vec![line, arc], 0..2);
        assert!((l.signed_area().abs() - PI / 2.0).abs() < 1e-12);
        assert!(l.parity([0.0, -0.5]));
        assert!(!l.parity([0.0, 0.5]));
        assert!(!l.parity([0.0, -1.01]));
    }

    #[test]
    fn arc_parity_matches_dense_polygon() {
        // Square with a bulging arc side vs a finely tessellated polygon.
        let arc = Segment::arc([0.5, -0.5], [0.5, 0.5], 2.0, true).unwrap();
        let segs = vec![
            Segment::Line { a: [-0.5, -0.5], b: [0.5, -0.5] },
            arc.clone(),
            Segment::Line { a: [0.5, 0.5], b: [-0.5, 0.5] },
            Segment::Line { a: [-0.5, 0.5], b: [-0.5, -0.5] },
        ];
        let l = Loop::new(segs, 0..4);
        let mut poly = vec![[-0.5, -0.5]];
        for k in 0..=4000 {
            poly.push(arc.point_and_right_normal(k as f64 / 4000.0).0);
        }
        poly.push([-0.5, 0.5]);
        let poly_loop = Loop::new(
            (0..poly.len()).map(|i| Segment::Line { a: poly[i], b: poly[(i + 1) % poly.len()] }).collect(),
            0..1,
        );
        assert!((l.signed_area() - poly_loop.signed_area()).abs() < 1e-5);
        let mut state = 12345u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..5000 {
            let p = [rnd(), rnd()];
            if l.distance(p) > 1e-4 {
                assert_eq!(l.parity(p), poly_loop.parity(p), "{p:?}");
            }
        }
    }

    #[test]
    fn distance_to_arc() {
        let arc = Segment::arc([1.0, 0.0], [-1.0, 0.0], PI, true).unwrap();
        assert!((arc.distance([0.0, 2.0]) - 1.0).abs() < 1e-12);
        assert!((arc.distance([0.0, -2.0]) - 5f64.sqrt()).abs() < 1e-12);
    }
}
