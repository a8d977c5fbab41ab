use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::par;

use super::{dot, infonce_gradient, ContrastiveBatch, LatentError};

/// Minimum number of training pairs.
pub const MIN_PAIRS: usize = 32;

/// `z = W x` with `W` stored row-major (`out x in`).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearEncoder {
    pub d_in: usize,
    pub d_out: usize,
    pub w: Vec<f64>,
}

impl LinearEncoder {
    pub fn random(d_in: usize, d_out: usize, rng: &mut ChaCha8Rng) -> LinearEncoder {
        let s = 1.0 / (d_in as f64).sqrt();
        let w = (0..d_in * d_out)
            .map(|_| {
                let g: f64 = StandardNormal.sample(rng);
                g * s
            })
            .collect();
        LinearEncoder { d_in, d_out, w }
    }

    pub fn encode(&self, x: &[f64]) -> Vec<f64> {
        (0..self.d_out).map(|r| dot(&self.w[r * self.d_in..(r + 1) * self.d_in], x)).collect()
    }

    fn step(&mut self, xs: &[&[f64]], grads: &[Vec<f64>], lr: f64) {
        let mut dw = vec![0.0; self.w.len()];
        for (x, g) in xs.iter().zip(grads) {
            for r in 0..self.d_out {
                for (k, xv) in x.iter().enumerate() {
                    dw[r * self.d_in + k] += g[r] * xv;
                }
            }
        }
        for (w, d) in self.w.iter_mut().zip(dw) {
            *w -= lr * d;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToyConfig {
    pub d_m: usize,
    pub epochs: usize,
    pub lr: f64,
    pub tau: f64,
    pub seed: u64,
    /// Start both encoders from the same weights (requires equal input
    /// dimensions).
    pub shared_init: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ToyResult {
    pub enc_a: LinearEncoder,
    pub enc_b: LinearEncoder,
    /// Full-batch loss at the start of each epoch.
    pub losses: Vec<f64>,
}

/// Trains two linear encoders by full-batch gradient descent on the
/// contrastive loss, with pair `i`'s two features as the positive pair.
pub fn toy_align_train(pairs: &[(Vec<f64>, Vec<f64>)], cfg: ToyConfig) -> Result<ToyResult, LatentError> {
    if pairs.len() < MIN_PAIRS {
        return Err(LatentError::TooFewPairs { need: MIN_PAIRS, got: pairs.len() });
    }
    let (da, db) = (pairs[0].0.len(), pairs[0].1.len());
    let mut rng = par::rng_from(cfg.seed, &[]);
    let mut enc_a = LinearEncoder::random(da, cfg.d_m, &mut rng);
    let mut enc_b = if cfg.shared_init && da == db { enc_a.clone() } else { LinearEncoder::random(db, cfg.d_m, &mut rng) };
    let xa: Vec<&[f64]> = pairs.iter().map(|p| p.0.as_slice()).collect();
    let xb: Vec<&[f64]> = pairs.iter().map(|p| p.1.as_slice()).collect();
    let mut losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let za = xa.iter().map(|x| enc_a.encode(x)).collect();
        let zb = xb.iter().map(|x| enc_b.encode(x)).collect();
        let batch = ContrastiveBatch::new(za, zb, cfg.tau).map_err(|_| LatentError::NonFiniteLoss(epoch))?;
        let (loss, ga, gb) = infonce_gradient(&batch);
        if !loss.is_finite() || ga.iter().chain(&gb).flatten().any(|g| !g.is_finite()) {
            return Err(LatentError::NonFiniteLoss(epoch));
        }
        losses.push(loss);
        enc_a.step(&xa, &ga, cfg.lr);
        enc_b.step(&xb, &gb, cfg.lr);
    }
    Ok(ToyResult { enc_a, enc_b, losses })
}

fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d);
    while rows.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        for r in &rows {
            let p = dot(&v, r);
            v.iter_mut().zip(r).for_each(|(a, b)| *a -= p * b);
        }
        let n = dot(&v, &v).sqrt();
        if n > 1e-8 {
            rows.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    rows
}

/// Pairs of `d_feat`-dimensional features, each a different random
/// orthogonal transform of a shared `d_latent`-dimensional Gaussian latent
/// (zero-padded), plus Gaussian noise of standard deviation `noise`.
pub fn synthetic_alignment_task(
    n: usize,
    d_feat: usize,
    d_latent: usize,
    noise: f64,
    seed: u64,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    assert!(d_latent <= d_feat, "latent wider than features");
    let mut rng = par::rng_from(seed, &[]);
    let qa = random_orthogonal(d_feat, &mut rng);
    let qb = random_orthogonal(d_feat, &mut rng);
    let view = |q: &[Vec<f64>], s: &[f64], rng: &mut ChaCha8Rng| -> Vec<f64> {
        q.iter()
            .map(|row| {
                let g: f64 = StandardNormal.sample(rng);
                dot(&row[..s.len()], s) + noise * g
            })
            .collect()
    };
    (0..n)
        .map(|_| {
            let s: Vec<f64> = (0..d_latent).map(|_| StandardNormal.sample(&mut rng)).collect();
            let a = view(&qa, &s, &mut rng);
            let b = view(&qb, &s, &mut rng);
            (a, b)
        })
        .collect()
}
