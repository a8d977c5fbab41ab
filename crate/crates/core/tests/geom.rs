use std::f64::consts::PI;

use cadseq::cadlang::{BoolOp, CadProgram, Command, Extent};
use cadseq::fixture::{self, box_group, xy_extrude};
use cadseq::geom::{compile, is_valid, monte_carlo_volume, sample_surface, CompileError, SolidModel};
use cadseq::par;
use proptest::prelude::*;
use rand::Rng;

fn solid(p: &CadProgram) -> SolidModel {
    compile(p).expect("compiles")
}

#[test]
fn circle_extrude_is_one_cylinder() {
    let s = solid(&fixture::cylinder());
    assert_eq!(s.terms.len(), 1);
    assert_eq!(s.terms[0].op, BoolOp::NewBody);
    let b = s.bbox;
    for k in 0..3 {
        assert!((b.min[k] + 0.5).abs() < 1e-12 && (b.max[k] - 0.5).abs() < 1e-12);
    }
}

#[test]
fn square_join_after_first_body() {
    let mut c = fixture::cylinder().commands;
    c.extend(box_group([64, 64], [192, 192], 160, 160, BoolOp::Join));
    let s = solid(&CadProgram::new(c));
    assert_eq!(s.terms.len(), 2);
    assert_eq!(s.terms[1].op, BoolOp::Join);
}

#[test]
fn unclosable_three_line_loop_fails_at_last_command() {
    // The third line returns to where the second ended, so no closing edge
    // can be formed without a zero-length curve.
    let p = CadProgram::new(vec![
        Command::Sol,
        Command::Line { x: 192, y: 64 },
        Command::Line { x: 192, y: 192 },
        Command::Line { x: 192, y: 192 },
        Command::Extrude(xy_extrude(192, 128, BoolOp::NewBody, Extent::OneSided)),
    ]);
    let e = compile(&p).unwrap_err();
    assert_eq!(e.index(), Some(3), "{e}");

    let mixed = CadProgram::new(vec![
        Command::Sol,
        Command::Circle { x: 128, y: 128, r: 30 },
        Command::Line { x: 192, y: 64 },
        Command::Extrude(xy_extrude(192, 128, BoolOp::NewBody, Extent::OneSided)),
    ]);
    assert_eq!(compile(&mixed).unwrap_err(), CompileError::OpenLoop { index: 2 });
}

#[test]
fn zero_thickness_and_scale_are_rejected() {
    let mut c = fixture::unit_cube().commands;
    let Command::Extrude(mut e) = c[5] else { panic!() };
    e.extent = Extent::OneSided;
    e.e1 = 128;
    c[5] = Command::Extrude(e);
    assert_eq!(compile(&CadProgram::new(c.clone())).unwrap_err(), CompileError::ZeroThickness { index: 5 });
    e.e1 = 192;
    e.scale = 0;
    c[5] = Command::Extrude(e);
    assert_eq!(compile(&CadProgram::new(c)).unwrap_err(), CompileError::ZeroScale { index: 5 });
}

#[test]
fn membership_of_reference_solids() {
    let cube = solid(&fixture::unit_cube());
    assert!(cube.contains([0.0, 0.0, 0.0]));
    assert!(!cube.contains([2.0, 2.0, 2.0]));
    assert!(cube.contains([0.5, 0.5, 0.5]));

    let hollow = solid(&fixture::hollow_cube());
    assert!(!hollow.contains([0.0, 0.0, 0.0]));
    let analytic = |q: [f64; 3]| {
        let outer = q.iter().all(|v| v.abs() <= 0.5);
        let inner = q.iter().all(|v| v.abs() <= 0.25);
        outer && !inner
    };
    let mut rng = par::rng_from(1, &[]);
    for _ in 0..20_000 {
        let q: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.7..0.7));
        if q.iter().any(|v| (v.abs() - 0.5).abs() < 1e-6 || (v.abs() - 0.25).abs() < 1e-6) {
            continue;
        }
        assert_eq!(hollow.contains(q), analytic(q), "{q:?}");
    }
}

#[test]
fn monte_carlo_volumes() {
    let cube = monte_carlo_volume(&solid(&fixture::unit_cube()), 100_000, 11);
    assert!((cube.volume - 1.0).abs() <= 0.01, "{cube:?}");
    let cyl = monte_carlo_volume(&solid(&fixture::cylinder()), 100_000, 11);
    assert!((cyl.volume - PI / 4.0).abs() <= 0.01, "{cyl:?}");
    assert!(cyl.std_error > 0.0 && cyl.std_error < 0.005);
    let empty = monte_carlo_volume(&solid(&fixture::self_cut(&fixture::unit_cube())), 10_000, 11);
    assert_eq!(empty.volume, 0.0);
    let hollow = monte_carlo_volume(&solid(&fixture::hollow_cube()), 100_000, 11);
    assert!((hollow.volume - 0.875).abs() <= 0.01, "{hollow:?}");
}

#[test]
fn monte_carlo_is_thread_independent() {
    let s = solid(&fixture::hollow_cube());
    let a = cadseq::geom::monte_carlo_volume_with(&s, 50_000, 3, par::Exec::Sequential);
    let b = cadseq::geom::monte_carlo_volume_with(&s, 50_000, 3, par::Exec::Parallel);
    assert_eq!(a, b);
}

#[test]
fn cylinder_samples_lie_on_the_surface() {
    let pc = sample_surface(&solid(&fixture::cylinder()), 4096, 5).unwrap();
    assert_eq!(pc.len(), 4096);
    let on = pc
        .points
        .iter()
        .filter(|p| {
            let r = p[0].hypot(p[1]);
            let wall = if p[2].abs() <= 0.5 { (r - 0.5).abs() } else { f64::INFINITY };
            let cap = if r <= 0.5 { (p[2].abs() - 0.5).abs() } else { f64::INFINITY };
            wall.min(cap) <= 1e-6
        })
        .count();
    assert!(on as f64 >= 0.99 * 4096.0, "{on}");
    for n in pc.normals.as_ref().unwrap() {
        assert!(((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn cube_faces_are_area_weighted() {
    let n = 200_000;
    let pc = sample_surface(&solid(&fixture::unit_cube()), n, 9).unwrap();
    let mut counts = [0usize; 6];
    for (p, nrm) in pc.points.iter().zip(pc.normals.as_ref().unwrap()) {
        let axis = (0..3).max_by(|&a, &b| nrm[a].abs().total_cmp(&nrm[b].abs())).unwrap();
        assert!((p[axis].abs() - 0.5).abs() < 1e-12);
        assert_eq!(p[axis].signum(), nrm[axis].signum(), "normal must point outward");
        counts[2 * axis + usize::from(nrm[axis] > 0.0)] += 1;
    }
    for c in counts {
        let frac = c as f64 / n as f64;
        assert!((frac - 1.0 / 6.0).abs() <= 0.02 / 6.0, "{counts:?}");
    }
}

#[test]
fn empty_result_cannot_be_sampled() {
    let s = solid(&fixture::self_cut(&fixture::unit_cube()));
    assert!(sample_surface(&s, 100, 1).is_err());
}

fn soundness(p: &CadProgram, seed: u64) -> f64 {
    let s = solid(p);
    let pc = sample_surface(&s, 4000, seed).unwrap();
    let eps = 1e-4;
    let good = pc
        .points
        .iter()
        .zip(pc.normals.as_ref().unwrap())
        .filter(|(q, n)| {
            let inward = std::array::from_fn(|k| q[k] - eps * n[k]);
            let outward = std::array::from_fn(|k| q[k] + eps * n[k]);
            s.contains(inward) && !s.contains(outward)
        })
        .count();
    good as f64 / pc.len() as f64
}

#[test]
fn samples_sit_on_the_final_boundary() {
    assert!(soundness(&fixture::hollow_cube(), 1) >= 0.99);
    assert!(soundness(&fixture::cylinder(), 2) >= 0.99);
    let mut rng = par::rng_from(4, &[]);
    for len in [9, 17, 31, 52] {
        let p = fixture::random_program(&mut rng, len);
        let frac = soundness(&p, len as u64);
        assert!(frac >= 0.99, "length {len}: {frac}");
    }
}

#[test]
fn cut_faces_point_into_the_cavity() {
    let s = solid(&fixture::hollow_cube());
    let pc = sample_surface(&s, 4000, 3).unwrap();
    for (p, n) in pc.points.iter().zip(pc.normals.as_ref().unwrap()) {
        if p.iter().all(|v| v.abs() <= 0.25 + 1e-12) {
            let axis = (0..3).max_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs())).unwrap();
            assert_eq!(p[axis].signum(), -n[axis].signum());
        }
    }
}

#[test]
fn sampling_is_deterministic() {
    let mut rng = par::rng_from(8, &[]);
    let p = fixture::random_program(&mut rng, 24);
    let s = solid(&p);
    let a = sample_surface(&s, 2048, 77).unwrap();
    let b = sample_surface(&solid(&p), 2048, 77).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.points, sample_surface(&s, 2048, 78).unwrap().points);
}

#[test]
fn sampling_follows_plane_translation_and_scale() {
    let base = fixture::cylinder();
    let moved = {
        let mut c = base.commands.clone();
        let Command::Extrude(mut e) = c[2] else { panic!() };
        (e.px, e.py, e.pz) = (144, 96, 136);
        c[2] = Command::Extrude(e);
        CadProgram::new(c)
    };
    let shift = [16.0 / 128.0, -32.0 / 128.0, 8.0 / 128.0];
    let a = sample_surface(&solid(&base), 1000, 21).unwrap();
    let b = sample_surface(&solid(&moved), 1000, 21).unwrap();
    for (p, q) in a.points.iter().zip(&b.points) {
        for k in 0..3 {
            assert!((p[k] + shift[k] - q[k]).abs() < 1e-12);
        }
    }
    assert_eq!(a.normals, b.normals);

    // Half the profile scale with half the extrusion distances is the same
    // solid shrunk about the plane origin.
    let half = CadProgram::new({
        let mut c = base.commands.clone();
        c[2] = Command::Extrude(cadseq::cadlang::ExtrudeParams {
            scale: 64,
            ..xy_extrude(160, 160, BoolOp::NewBody, Extent::TwoSided)
        });
        c
    });
    let h = sample_surface(&solid(&half), 1000, 21).unwrap();
    for (p, q) in a.points.iter().zip(&h.points) {
        for k in 0..3 {
            assert!((p[k] * 0.5 - q[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn validity_reports() {
    let r = is_valid(&fixture::cylinder());
    assert!(r.compiles && r.self_intersection_free && r.samplable && r.failure_detail.is_empty());
    let r = is_valid(&fixture::bowtie());
    assert!(r.compiles && !r.self_intersection_free && !r.is_valid());
    let r = is_valid(&fixture::self_cut(&fixture::cylinder()));
    assert!(r.compiles && r.self_intersection_free && !r.samplable);
    let r = is_valid(&CadProgram::new(vec![Command::Sol]));
    assert!(!r.compiles && !r.failure_detail.is_empty());
}

fn box_cmds(lo: [u8; 2], hi: [u8; 2], e: [u8; 2], op: BoolOp) -> Vec<Command> {
    box_group(lo, hi, e[0], e[1], op)
}

fn arb_box() -> impl Strategy<Value = ([u8; 2], [u8; 2], [u8; 2])> {
    (20u8..120, 20u8..120, 136u8..236, 136u8..236, 132u8..230, 132u8..230)
        .prop_map(|(x0, y0, x1, y1, e1, e2)| ([x0, y0], [x1, y1], [e1, e2]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn csg_matches_composed_predicates(a in arb_box(), b in arb_box(), seed in any::<u64>()) {
        let sa = solid(&CadProgram::new(box_cmds(a.0, a.1, a.2, BoolOp::NewBody)));
        let sb = solid(&CadProgram::new(box_cmds(b.0, b.1, b.2, BoolOp::NewBody)));
        let combined = |op| {
            let mut c = box_cmds(a.0, a.1, a.2, BoolOp::NewBody);
            c.extend(box_cmds(b.0, b.1, b.2, op));
            solid(&CadProgram::new(c))
        };
        let join = combined(BoolOp::Join);
        let cut = combined(BoolOp::Cut);
        let inter = combined(BoolOp::Intersect);
        let mut rng = par::rng_from(seed, &[]);
        for _ in 0..200 {
            let q: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.1..1.1));
            let (ia, ib) = (sa.contains(q), sb.contains(q));
            prop_assert_eq!(join.contains(q), ia || ib);
            prop_assert_eq!(cut.contains(q), ia && !ib);
            prop_assert_eq!(inter.contains(q), ia && ib);
        }
    }
}
