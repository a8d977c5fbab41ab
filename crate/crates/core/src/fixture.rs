//! Hand-built reference shapes and a seeded generator of valid programs of
//! any sequence length, used as a stand-in corpus by tests, benches and the
//! CLI when no real dataset is available.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cadlang::{BoolOp, CadProgram, Command, Extent, ExtrudeParams, MAX_SEQUENCE_LENGTH};
use crate::geom::quick_valid;
use crate::par;
use crate::synthbal::Split;

/// Shortest well-formed program: SOL, Circle, Extrude.
pub const MIN_SEQUENCE_LENGTH: usize = 3;

/// Extrude on the world XY plane through the origin at unit scale.
pub fn xy_extrude(e1: u8, e2: u8, op: BoolOp, extent: Extent) -> ExtrudeParams {
    ExtrudeParams {
        theta: 128,
        phi: 128,
        gamma: 128,
        px: 128,
        py: 128,
        pz: 128,
        scale: 128,
        e1,
        e2,
        op,
        extent,
    }
}

/// Axis-aligned rectangle loop with grid corners `lo` and `hi`.
pub fn rect_loop(lo: [u8; 2], hi: [u8; 2]) -> Vec<Command> {
    vec![
        Command::Sol,
        Command::Line { x: hi[0], y: lo[1] },
        Command::Line { x: hi[0], y: hi[1] },
        Command::Line { x: lo[0], y: hi[1] },
        Command::Line { x: lo[0], y: lo[1] },
    ]
}

/// Box `[lo, hi]` in the XY grid extruded over heights `[-e2, e1]`.
pub fn box_group(lo: [u8; 2], hi: [u8; 2], e1: u8, e2: u8, op: BoolOp) -> Vec<Command> {
    let mut c = rect_loop(lo, hi);
    c.push(Command::Extrude(xy_extrude(e1, e2, op, Extent::TwoSided)));
    c
}

/// The cube `[-0.5, 0.5]^3`.
pub fn unit_cube() -> CadProgram {
    CadProgram::new(box_group([64, 64], [192, 192], 192, 192, BoolOp::NewBody)).with_id("unit-cube")
}

/// Cylinder of radius 0.5 and height 1 centred at the origin, axis along z.
pub fn cylinder() -> CadProgram {
    CadProgram::new(vec![
        Command::Sol,
        Command::Circle { x: 128, y: 128, r: 64 },
        Command::Extrude(xy_extrude(192, 192, BoolOp::NewBody, Extent::TwoSided)),
    ])
    .with_id("cylinder")
}

/// A solid followed by the same solid as a Cut: the result is empty.
pub fn self_cut(p: &CadProgram) -> CadProgram {
    let mut commands = p.commands.clone();
    for c in &p.commands {
        let c = match *c {
            Command::Extrude(mut e) => {
                e.op = BoolOp::Cut;
                Command::Extrude(e)
            }
            c => c,
        };
        commands.push(c);
    }
    CadProgram::new(commands)
}

/// Unit cube with a concentric cube of half the edge cut out of it.
pub fn hollow_cube() -> CadProgram {
    let mut c = box_group([64, 64], [192, 192], 192, 192, BoolOp::NewBody);
    c.extend(box_group([96, 96], [160, 160], 160, 160, BoolOp::Cut));
    CadProgram::new(c).with_id("hollow-cube")
}

/// Extruded quadrilateral whose edges cross (lobes of unequal area, so it
/// still compiles).
pub fn bowtie() -> CadProgram {
    CadProgram::new(vec![
        Command::Sol,
        Command::Line { x: 192, y: 64 },
        Command::Line { x: 64, y: 192 },
        Command::Line { x: 232, y: 192 },
        Command::Line { x: 64, y: 64 },
        Command::Extrude(xy_extrude(192, 128, BoolOp::NewBody, Extent::OneSided)),
    ])
    .with_id("bowtie")
}

fn clamp_grid(v: f64) -> u8 {
    v.round().clamp(1.0, 255.0) as u8
}

/// Convex loop of `curves` curves around `center`, counter-clockwise. With
/// `arcs` some edges bulge outward as arcs; two curves always form a
/// D-shape (line + arc).
fn convex_loop(rng: &mut ChaCha8Rng, center: [f64; 2], radius: f64, curves: usize, arcs: bool) -> Vec<Command> {
    let mut out = vec![Command::Sol];
    if curves == 2 {
        let a = rng.random::<f64>() * TAU;
        let p = |t: f64| {
            Command::Line { x: clamp_grid(center[0] + radius * t.cos()), y: clamp_grid(center[1] + radius * t.sin()) }
        };
        let Command::Line { x, y } = p(a + TAU / 2.0) else { unreachable!() };
        out.push(p(a));
        out.push(Command::Arc { x, y, sweep: 128, ccw: true });
        return out;
    }
    let base = rng.random::<f64>() * TAU;
    let step = TAU / curves as f64;
    for k in 0..curves {
        let t = base + step * (k as f64 + 0.3 * (rng.random::<f64>() - 0.5));
        let x = clamp_grid(center[0] + radius * t.cos());
        let y = clamp_grid(center[1] + radius * t.sin());
        if arcs && rng.random::<f64>() < 0.25 {
            out.push(Command::Arc { x, y, sweep: rng.random_range(8..=32), ccw: true });
        } else {
            out.push(Command::Line { x, y });
        }
    }
    out
}

/// Sketch spending exactly `budget` commands (SOL rows included): one outer
/// loop plus circular holes.
fn sketch(rng: &mut ChaCha8Rng, budget: usize, arcs: bool) -> Vec<Command> {
    debug_assert!(budget >= 2);
    let center = [128.0, 128.0];
    let radius = 90.0;
    let max_holes = (budget.saturating_sub(4) / 2).min(6);
    let holes = if max_holes == 0 { 0 } else { rng.random_range(0..=max_holes) };
    let outer = budget - 2 * holes;
    let mut out = if outer == 2 {
        vec![Command::Sol, Command::Circle { x: 128, y: 128, r: 90 }]
    } else {
        convex_loop(rng, center, radius, outer - 1, arcs)
    };
    let mut spots: Vec<(i32, i32)> =
        (-2..=2).flat_map(|i| (-2..=2).map(move |j| (i * 14, j * 14))).filter(|(i, j)| i * i + j * j <= 33 * 33).collect();
    spots.shuffle(rng);
    for &(dx, dy) in spots.iter().take(holes) {
        out.push(Command::Sol);
        out.push(Command::Circle { x: (128 + dx) as u8, y: (128 + dy) as u8, r: rng.random_range(3..=5) });
    }
    out
}

fn random_extrude(rng: &mut ChaCha8Rng, first: bool) -> ExtrudeParams {
    let quarter = [64u8, 128, 192];
    let extent = [Extent::OneSided, Extent::Symmetric, Extent::TwoSided][rng.random_range(0..3)];
    ExtrudeParams {
        theta: quarter[rng.random_range(0..3)],
        phi: quarter[rng.random_range(0..3)],
        gamma: quarter[rng.random_range(0..3)],
        px: rng.random_range(104..=152),
        py: rng.random_range(104..=152),
        pz: rng.random_range(104..=152),
        scale: rng.random_range(48..=128),
        e1: rng.random_range(144..=224),
        e2: if extent == Extent::TwoSided { rng.random_range(136..=192) } else { 128 },
        op: if first { BoolOp::NewBody } else { BoolOp::Join },
        extent,
    }
}

fn split_budget(rng: &mut ChaCha8Rng, len: usize) -> Vec<usize> {
    let mut groups = Vec::new();
    let mut left = len;
    while left > 0 {
        let take = if left <= 14 { left } else { rng.random_range(3..=(left - 3).min(14)) };
        groups.push(take);
        left -= take;
    }
    groups
}

fn build(rng: &mut ChaCha8Rng, len: usize, arcs: bool) -> CadProgram {
    let mut commands = Vec::with_capacity(len);
    for (g, budget) in split_budget(rng, len).into_iter().enumerate() {
        commands.extend(sketch(rng, budget - 1, arcs));
        commands.push(Command::Extrude(random_extrude(rng, g == 0)));
    }
    debug_assert_eq!(commands.len(), len);
    CadProgram::new(commands)
}

/// A valid program of exactly `len` commands.
///
/// # Panics
/// If `len` is outside `3..=59`.
pub fn random_program(rng: &mut ChaCha8Rng, len: usize) -> CadProgram {
    assert!((MIN_SEQUENCE_LENGTH..=MAX_SEQUENCE_LENGTH).contains(&len), "length {len} out of range");
    for attempt in 0..64 {
        let p = build(rng, len, attempt < 32);
        if quick_valid(&p) {
            return p;
        }
    }
    // Fallback without polygons: a disc or D-shape with small circular holes.
    let mut commands = Vec::with_capacity(len);
    for (g, budget) in split_budget(rng, len).into_iter().enumerate() {
        let s = budget - 1;
        if s % 2 == 0 {
            commands.extend([Command::Sol, Command::Circle { x: 128, y: 128, r: 90 }]);
        } else {
            commands.extend([
                Command::Sol,
                Command::Line { x: 200, y: 128 },
                Command::Arc { x: 56, y: 128, sweep: 128, ccw: true },
            ]);
        }
        for k in 0..(s - 2) / 2 {
            let (i, j) = (k as u8 % 3, k as u8 / 3);
            commands.extend([Command::Sol, Command::Circle { x: 114 + 14 * i, y: 142 + 14 * j, r: 3 }]);
        }
        commands.push(Command::Extrude(random_extrude(rng, g == 0)));
    }
    CadProgram::new(commands)
}

/// Long-tailed corpus: length weights decay geometrically from the short end,
/// so long programs are rare. Program `i` is generated from its own derived
/// seed.
pub fn long_tail_corpus(seed: u64, n: usize) -> Vec<CadProgram> {
    let lengths: Vec<usize> = (MIN_SEQUENCE_LENGTH..=MAX_SEQUENCE_LENGTH).collect();
    let weights: Vec<f64> = lengths.iter().map(|&l| 0.93f64.powi((l - MIN_SEQUENCE_LENGTH) as i32)).collect();
    let total: f64 = weights.iter().sum();
    (0..n)
        .map(|i| {
            let mut rng = par::rng_from(seed, &[i as u64]);
            let mut x = rng.random::<f64>() * total;
            let mut len = *lengths.last().unwrap();
            for (l, w) in lengths.iter().zip(&weights) {
                if x < *w {
                    len = *l;
                    break;
                }
                x -= w;
            }
            random_program(&mut rng, len).with_id(format!("fx-{i:05}"))
        })
        .collect()
}

/// Programs for every split and length, `count(split, len)` of each. Ids are
/// `fx-{split}-{len}-{k}`.
pub fn split_corpus(seed: u64, count: impl Fn(Split, usize) -> usize) -> Vec<(CadProgram, Split)> {
    let mut out = Vec::new();
    for split in Split::ALL {
        for len in MIN_SEQUENCE_LENGTH..=MAX_SEQUENCE_LENGTH {
            for k in 0..count(split, len) {
                let mut rng = par::rng_from(seed, &[split.index(), len as u64, k as u64]);
                out.push((random_program(&mut rng, len).with_id(format!("fx-{split}-{len}-{k}")), split));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::is_valid;

    #[test]
    fn reference_shapes_are_valid() {
        for p in [unit_cube(), cylinder(), hollow_cube()] {
            let r = is_valid(&p);
            assert!(r.is_valid(), "{:?}: {}", p.source_id, r.failure_detail);
        }
        let r = is_valid(&bowtie());
        assert!(r.compiles && !r.self_intersection_free, "{r:?}");
        assert!(!is_valid(&self_cut(&unit_cube())).samplable);
    }

    #[test]
    fn every_length_is_reachable() {
        let mut rng = par::rng_from(7, &[]);
        for len in MIN_SEQUENCE_LENGTH..=MAX_SEQUENCE_LENGTH {
            let p = random_program(&mut rng, len);
            assert_eq!(p.len(), len);
            assert!(is_valid(&p).is_valid(), "length {len}");
        }
    }

    #[test]
    fn corpus_is_long_tailed_and_deterministic() {
        let a = long_tail_corpus(3, 200);
        assert_eq!(a, long_tail_corpus(3, 200));
        let short = a.iter().filter(|p| p.len() < 15).count();
        let long = a.iter().filter(|p| p.len() >= 40).count();
        assert!(short > 5 * long.max(1), "short {short} long {long}");
    }
}
