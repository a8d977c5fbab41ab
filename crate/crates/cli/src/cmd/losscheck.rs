use anyhow::Result;
use cadseq::latent::{
    diffusion_loss, diffusion_loss_and_grad, infonce_gradient, infonce_loss, ContrastiveBatch, EpsilonPredictor,
    NoiseSchedule, ResidualMlp,
};
use cadseq::par::{self, rng_from};
use clap::Args;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::json;

use crate::run::Report;
use crate::Ctx;

#[derive(Args, Debug)]
pub struct LossCheckArgs {
    /// Random instances per gradient check.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-6)]
    step: f64,
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    instances: usize,
    worst: f64,
    tolerance: f64,
    pass: bool,
}

fn gauss(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    d / a.iter().chain(b).map(|x| x * x).sum::<f64>().sqrt().max(1e-8)
}

fn contrastive_error(rng: &mut ChaCha8Rng, h: f64) -> f64 {
    let (b, d) = (rng.random_range(2..6), rng.random_range(2..7));
    let tau = rng.random_range(0.2..1.0);
    let zc: Vec<Vec<f64>> = (0..b).map(|_| gauss(rng, d)).collect();
    let zm: Vec<Vec<f64>> = (0..b).map(|_| gauss(rng, d)).collect();
    let batch = ContrastiveBatch::new(zc, zm, tau).expect("random batch is valid");
    let (_, gc, gm) = infonce_gradient(&batch);
    let analytic: Vec<f64> = gc.iter().chain(&gm).flatten().copied().collect();
    let mut numeric = Vec::with_capacity(analytic.len());
    for side in 0..2 {
        for i in 0..b {
            for k in 0..d {
                let at = |delta: f64| {
                    let mut c = batch.clone();
                    let v = if side == 0 { &mut c.zc[i][k] } else { &mut c.zm[i][k] };
                    *v += delta;
                    infonce_loss(&c)
                };
                numeric.push((at(h) - at(-h)) / (2.0 * h));
            }
        }
    }
    rel_err(&analytic, &numeric)
}

fn diffusion_error(rng: &mut ChaCha8Rng, sched: &NoiseSchedule, h: f64, seed: u64) -> f64 {
    let (latent, cond) = (rng.random_range(2..5), rng.random_range(1..4));
    let mlp = ResidualMlp::new(latent, cond, 4, rng.random_range(3..7), seed);
    let (z0, zm, eps) = (gauss(rng, latent), gauss(rng, cond), gauss(rng, latent));
    let t = rng.random_range(1..=sched.steps());
    let (_, grad) = diffusion_loss_and_grad(&mlp, &z0, &zm, t, sched, &eps);
    let numeric: Vec<f64> = (0..mlp.params.len())
        .map(|k| {
            let at = |delta: f64| {
                let mut m = mlp.clone();
                m.params[k] += delta;
                diffusion_loss(&m, &z0, &zm, t, sched, &eps)
            };
            (at(h) - at(-h)) / (2.0 * h)
        })
        .collect();
    rel_err(&grad, &numeric)
}

/// Predicts the true noise by inverting the forward process.
struct Oracle<'a> {
    z0: &'a [f64],
    sched: &'a NoiseSchedule,
}

impl EpsilonPredictor for Oracle<'_> {
    fn predict(&self, z_t: &[f64], t: usize, _: &[f64]) -> Vec<f64> {
        let a = self.sched.alpha_bar(t);
        z_t.iter().zip(self.z0).map(|(z, z0)| (z - a.sqrt() * z0) / (1.0 - a).sqrt()).collect()
    }
}

pub fn loss_check(args: &LossCheckArgs, ctx: &Ctx) -> Result<Report> {
    let seed = ctx.run.seed;
    let n = args.instances;
    let sched = NoiseSchedule::ddim_default();

    let v = vec![vec![0.3, -1.2, 0.7]; 2];
    let identical = infonce_loss(&ContrastiveBatch::new(v.clone(), v, 0.07).expect("valid batch"));
    let ln3_err = (identical - 3f64.ln()).abs();

    let max = |xs: Vec<f64>| xs.into_iter().fold(0.0, f64::max);
    let contrastive = max(par::map_indexed(ctx.exec, n, |i| contrastive_error(&mut rng_from(seed, &[1, i as u64]), args.step)));
    let diffusion = max(par::map_indexed(ctx.exec, n, |i| {
        diffusion_error(&mut rng_from(seed, &[2, i as u64]), &sched, args.step, i as u64)
    }));
    let oracle = max(
        (0..n)
            .map(|i| {
                let mut rng = rng_from(seed, &[3, i as u64]);
                let (z0, eps) = (gauss(&mut rng, 8), gauss(&mut rng, 8));
                let t = rng.random_range(1..=sched.steps());
                diffusion_loss(&Oracle { z0: &z0, sched: &sched }, &z0, &[0.0], t, &sched, &eps)
            })
            .collect(),
    );

    let row = |check, instances, worst: f64, tolerance| CheckRow { check, instances, worst, tolerance, pass: worst < tolerance };
    let rows = vec![
        row("infonce_identical_batch_ln3", 1, ln3_err, 1e-9),
        row("infonce_gradient_vs_central_difference", n, contrastive, 1e-4),
        row("diffusion_gradient_vs_central_difference", n, diffusion, 1e-4),
        row("diffusion_oracle_predictor_loss", n, oracle, 1e-12),
    ];
    let failures = rows.iter().filter(|r| !r.pass).count();
    Report::table(&rows, json!({ "step": args.step }), failures)
}
