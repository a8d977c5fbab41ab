use std::collections::BTreeMap;

use cadseq::cadlang::{BoolOp, CadProgram, Command, Extent, ExtrudeParams};
use cadseq::fixture::{cylinder, rect_loop, unit_cube, xy_extrude};
use cadseq::geom::{compile, PointCloud, P3};
use cadseq::metrics::*;
use cadseq::par::rng_from;
use cadseq::Exec;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_cloud(seed: u64, n: usize) -> PointCloud {
    let mut rng = rng_from(seed, &[]);
    PointCloud::from_points((0..n).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect())
}

/// Full distance matrix, then row and column minima.
fn chamfer_oracle(a: &[P3], b: &[P3]) -> f64 {
    let d: Vec<Vec<f64>> =
        a.iter().map(|p| b.iter().map(|q| (0..3).map(|k| (p[k] - q[k]).powi(2)).sum()).collect()).collect();
    let ab: f64 = d.iter().map(|row| row.iter().copied().fold(f64::MAX, f64::min)).sum::<f64>() / a.len() as f64;
    let ba: f64 = (0..b.len()).map(|j| d.iter().map(|row| row[j]).fold(f64::MAX, f64::min)).sum::<f64>() / b.len() as f64;
    1000.0 * (ab + ba)
}

#[test]
fn chamfer_matches_brute_force() {
    for seed in 0..20 {
        let (a, b) = (random_cloud(seed, 50), random_cloud(seed + 100, 37));
        let got = chamfer_distance(&a, &b);
        assert!((got - chamfer_oracle(&a.points, &b.points)).abs() < 1e-9 * got.max(1.0));
        assert_eq!(chamfer_distance_with(&a, &b, Exec::Parallel), got);
    }
}

#[test]
fn chamfer_closed_forms() {
    let a = PointCloud::from_points(vec![[0.0, 0.0, 0.0]]);
    let b = PointCloud::from_points(vec![[1.0, 0.0, 0.0]]);
    assert_eq!(chamfer_distance(&a, &b), 2000.0);
    let c = PointCloud::from_points(vec![[0.0, 0.0, 0.0], [0.0, 2.0, 0.0]]);
    assert_eq!(chamfer_distance(&a, &c), 2000.0);
    assert_eq!(chamfer_distance(&c, &c), 0.0);
}

fn solid(p: &CadProgram) -> cadseq::SolidModel {
    compile(p).unwrap()
}

fn shifted_cube(px: u8) -> CadProgram {
    let mut c = rect_loop([64, 64], [192, 192]);
    c.push(Command::Extrude(ExtrudeParams { px, ..xy_extrude(192, 192, BoolOp::NewBody, Extent::TwoSided) }));
    CadProgram::new(c)
}

fn slab(theta: u8) -> CadProgram {
    let mut c = rect_loop([64, 96], [192, 160]);
    c.push(Command::Extrude(ExtrudeParams { theta, ..xy_extrude(144, 144, BoolOp::NewBody, Extent::TwoSided) }));
    CadProgram::new(c)
}

#[test]
fn iou_self_and_offset_cubes() {
    let cube = solid(&unit_cube());
    let off = IouOptions { normalize: false, align: false, exec: Exec::Sequential };
    assert!((iou_aligned(&cube, &cube, 100_000, 1, IouOptions::default()).unwrap() - 1.0).abs() < 0.01);
    // [-0.5, 0.5] against [0, 1] along x: overlap 1/2, union 3/2.
    let moved = solid(&shifted_cube(192));
    let v = iou_aligned(&cube, &moved, 200_000, 2, off).unwrap();
    assert!((v - 1.0 / 3.0).abs() < 0.01, "{v}");
}

#[test]
fn alignment_recovers_a_quarter_turn() {
    // 1 x 0.5 x 0.25 slab against the same slab turned about z: the
    // unaligned overlap is 0.5 x 0.5 x 0.25 of a 0.1875 union.
    let (a, b) = (solid(&slab(128)), solid(&slab(192)));
    let opts = IouOptions { align: false, ..IouOptions::default() };
    let plain = iou_aligned(&a, &b, 200_000, 3, opts).unwrap();
    assert!((plain - 1.0 / 3.0).abs() < 0.01, "{plain}");
    let per = iou_per_rotation(&a, &b, 100_000, 4, IouOptions::default()).unwrap();
    assert_eq!(per.len(), 24);
    let best = per.iter().copied().fold(0.0, f64::max);
    assert!(best > 0.99, "{best}");
    assert_eq!(iou_aligned(&a, &b, 100_000, 4, IouOptions::default()).unwrap(), best);
    let par = IouOptions { exec: Exec::Parallel, ..IouOptions::default() };
    assert_eq!(iou_per_rotation(&a, &b, 100_000, 4, par).unwrap(), per);
}

#[test]
fn self_iou_dominates() {
    let (s, t) = (solid(&unit_cube()), solid(&cylinder()));
    let ss = iou_aligned(&s, &s, 50_000, 5, IouOptions::default()).unwrap();
    let st = iou_aligned(&s, &t, 50_000, 5, IouOptions::default()).unwrap();
    assert!(ss >= st && st > 0.5, "{ss} {st}");
}

fn gaussian_set(seed: u64, n: usize, dim: usize) -> EmbeddingSet {
    let mut rng = rng_from(seed, &[]);
    let vs = (0..n).map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
    EmbeddingSet::new((0..n).map(|i| format!("e{i}")).collect(), vs, "m".into()).unwrap()
}

#[test]
fn random_embeddings_sit_at_chance() {
    let (q, l) = (gaussian_set(1, 300, 8), gaussian_set(2, 300, 8));
    let pairs = pair_by_id(&q, &l).unwrap();
    for batch in [10, 128] {
        let r = retrieval_topn(&q, &l, &pairs, 1, batch, 100, 7).unwrap();
        let p = 1.0 / batch as f64;
        let sigma = (p * (1.0 - p) / (batch * 100) as f64).sqrt();
        assert!((r.accuracy - p).abs() < 3.0 * sigma + 1e-12, "{batch}: {}", r.accuracy);
    }
    let top5 = retrieval_topn(&q, &l, &pairs, 5, 10, 200, 8).unwrap();
    assert!((top5.accuracy - 0.5).abs() < 0.05);
    let all = retrieval_topn(&q, &l, &pairs, 10, 10, 5, 8).unwrap();
    assert_eq!(all.accuracy, 1.0);
}

#[test]
fn retrieval_is_thread_independent() {
    let (q, l) = (gaussian_set(3, 200, 6), gaussian_set(4, 200, 6));
    let pairs = pair_by_id(&q, &l).unwrap();
    let a = retrieval_topn_with(&q, &l, &pairs, 1, 64, 30, 2, Exec::Sequential).unwrap();
    let b = retrieval_topn_with(&q, &l, &pairs, 1, 64, 30, 2, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}

fn voxel_jsd_oracle(gen: &[PointCloud], refs: &[PointCloud]) -> f64 {
    let dist = |set: &[PointCloud]| {
        let mut m: BTreeMap<(i64, i64, i64), f64> = BTreeMap::new();
        for pc in set {
            let mut seen = std::collections::HashSet::new();
            for p in &pc.points {
                let c = |v: f64| ((v + 1.0) * 14.0).floor().clamp(0.0, 27.0) as i64;
                seen.insert((c(p[0]), c(p[1]), c(p[2])));
            }
            for k in seen {
                *m.entry(k).or_default() += 1.0;
            }
        }
        let total: f64 = m.values().sum();
        m.values_mut().for_each(|v| *v /= total);
        m
    };
    let (p, q) = (dist(gen), dist(refs));
    let keys: std::collections::BTreeSet<_> = p.keys().chain(q.keys()).copied().collect();
    let kl = |a: f64, m: f64| if a > 0.0 { a * (a / m).ln() } else { 0.0 };
    keys.iter()
        .map(|k| {
            let (a, b) = (p.get(k).copied().unwrap_or(0.0), q.get(k).copied().unwrap_or(0.0));
            let m = (a + b) / 2.0;
            (kl(a, m) + kl(b, m)) / 2.0
        })
        .sum()
}

#[test]
fn generation_quality_matches_brute_force() {
    let gen: Vec<PointCloud> = (0..4).map(|i| random_cloud(i, 40)).collect();
    let refs: Vec<PointCloud> = (10..15).map(|i| random_cloud(i, 40)).collect();
    let got = generation_quality(&gen, &refs).unwrap();
    let d: Vec<Vec<f64>> = gen.iter().map(|g| refs.iter().map(|r| chamfer_oracle(&g.points, &r.points)).collect()).collect();
    let mut matched = vec![false; refs.len()];
    for row in &d {
        let j = (0..refs.len()).min_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
        matched[j] = true;
    }
    let cov = matched.iter().filter(|&&m| m).count() as f64 / refs.len() as f64;
    let mmd = (0..refs.len()).map(|j| d.iter().map(|row| row[j]).fold(f64::MAX, f64::min)).sum::<f64>() / refs.len() as f64;
    assert_eq!(got.cov, cov);
    assert!((got.mmd - mmd).abs() < 1e-9 * mmd);
    assert!((got.jsd - voxel_jsd_oracle(&gen, &refs)).abs() < 1e-12);
    let same = generation_quality(&refs, &refs).unwrap();
    assert_eq!((same.jsd, same.cov, same.mmd), (0.0, 1.0, 0.0));
}

#[test]
fn report_rows_and_csv() {
    let items: Vec<ItemMetrics> = [(3, 1.0, 0.2, true), (3, 0.8, 0.4, true), (7, 0.5, 0.6, false)]
        .into_iter()
        .map(|(len, acc, cd, valid)| ItemMetrics {
            len,
            cmd_acc: Some(acc),
            param_acc: Some(acc),
            cd: valid.then_some(cd),
            iou: valid.then_some(acc),
            valid,
        })
        .collect();
    let config = ReportConfig { eta: 3, content_rows_only: false, chamfer_points: 100, iou_samples: 100, seed: 0 };
    let r = MetricsReport::build(&items, config);
    let all = r.row("ALL").unwrap();
    assert_eq!(all.count, 3);
    assert!((all.cmd_acc.unwrap() - 2.3 / 3.0).abs() < 1e-12);
    assert!((all.ir.unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!((all.cd_median.unwrap() - 0.3).abs() < 1e-12);
    let sl = r.row("SL_NORM").unwrap();
    assert_eq!(sl.count, 2);
    assert!((sl.cmd_acc.unwrap() - (0.9 + 0.5) / 2.0).abs() < 1e-12);
    let csv = r.to_csv(&["run: test".into()]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# run: test"));
    assert_eq!(lines.next(), Some("len,count,cmd_acc,param_acc,cd_median,iou_mean,ir"));
    assert_eq!(csv.lines().count(), 2 + 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chamfer_is_symmetric(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..30, m in 1usize..30) {
        let (a, b) = (random_cloud(s1, n), random_cloud(s2, m));
        prop_assert_eq!(chamfer_distance(&a, &b), chamfer_distance(&b, &a));
        prop_assert!(chamfer_distance(&a, &b) >= 0.0);
    }

    #[test]
    fn retrieval_ignores_positive_scaling(seed in any::<u64>(), k in 0.01f64..100.0) {
        let (q, l) = (gaussian_set(seed, 60, 5), gaussian_set(seed ^ 1, 60, 5));
        let pairs = pair_by_id(&q, &l).unwrap();
        let scaled = EmbeddingSet::new(
            l.ids.clone(),
            l.vectors.iter().map(|v| v.iter().map(|x| x * k).collect()).collect(),
            "m".into(),
        ).unwrap();
        let a = retrieval_topn(&q, &l, &pairs, 3, 20, 10, seed).unwrap();
        let b = retrieval_topn(&q, &scaled, &pairs, 3, 20, 10, seed).unwrap();
        prop_assert_eq!(a.per_trial, b.per_trial);
    }

    #[test]
    fn duplicating_a_length_keeps_its_weight(
        vals in proptest::collection::vec((3usize..8, 0.0f64..1.0), 1..30),
        dup in 3usize..8,
        times in 2usize..5,
    ) {
        let items: Vec<(usize, Option<f64>)> = vals.iter().map(|&(l, v)| (l, Some(v))).collect();
        let mut more = items.clone();
        for &(l, v) in &items {
            if l == dup {
                more.extend(std::iter::repeat_n((l, v), times - 1));
            }
        }
        let a = sl_normalize(&items, Statistic::Mean).unwrap();
        let b = sl_normalize(&more, Statistic::Mean).unwrap();
        prop_assert!((a.sl - b.sl).abs() < 1e-12);
    }
}
