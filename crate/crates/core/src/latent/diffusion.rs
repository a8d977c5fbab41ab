use rand_distr::{Distribution, StandardNormal};

use crate::par;

use super::LatentError;

/// Cumulative signal coefficients `alpha_bar[t]` for `t = 0..=T`, with
/// `alpha_bar[0] = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSchedule {
    alpha_bar: Vec<f64>,
}

impl NoiseSchedule {
    /// Betas spaced linearly from `beta_start` at `t = 1` to `beta_end` at
    /// `t = steps`.
    pub fn linear_beta(steps: usize, beta_start: f64, beta_end: f64) -> Result<NoiseSchedule, LatentError> {
        let mut alpha_bar = Vec::with_capacity(steps + 1);
        alpha_bar.push(1.0);
        let mut acc = 1.0;
        for t in 1..=steps {
            let frac = if steps > 1 { (t - 1) as f64 / (steps - 1) as f64 } else { 0.0 };
            acc *= 1.0 - (beta_start + (beta_end - beta_start) * frac);
            alpha_bar.push(acc);
        }
        NoiseSchedule::from_alpha_bar(alpha_bar[1..].to_vec())
    }

    /// `T = 1000`, betas from `1e-4` to `0.02`.
    pub fn ddim_default() -> NoiseSchedule {
        NoiseSchedule::linear_beta(1000, 1e-4, 0.02).expect("default schedule is valid")
    }

    /// Schedule from `alpha_bar[1..=T]`.
    pub fn from_alpha_bar(values: Vec<f64>) -> Result<NoiseSchedule, LatentError> {
        let mut alpha_bar = Vec::with_capacity(values.len() + 1);
        alpha_bar.push(1.0);
        alpha_bar.extend(values);
        let ok = alpha_bar.iter().all(|&a| a > 0.0 && a <= 1.0) && alpha_bar.windows(2).all(|w| w[1] <= w[0]);
        if !ok || alpha_bar.len() < 2 {
            return Err(LatentError::BadSchedule);
        }
        Ok(NoiseSchedule { alpha_bar })
    }

    pub fn steps(&self) -> usize {
        self.alpha_bar.len() - 1
    }

    pub fn alpha_bar(&self, t: usize) -> f64 {
        self.alpha_bar[t]
    }
}

/// `sqrt(alpha_bar_t) z0 + sqrt(1 - alpha_bar_t) eps`.
///
/// # Panics
/// If `t > T` or the vectors differ in length.
pub fn diffuse_forward(z0: &[f64], t: usize, schedule: &NoiseSchedule, eps: &[f64]) -> Vec<f64> {
    assert_eq!(z0.len(), eps.len(), "latent and noise dimensions differ");
    let a = schedule.alpha_bar(t);
    let (s, n) = (a.sqrt(), (1.0 - a).sqrt());
    z0.iter().zip(eps).map(|(z, e)| s * z + n * e).collect()
}

pub trait EpsilonPredictor {
    fn predict(&self, z_t: &[f64], t: usize, z_m: &[f64]) -> Vec<f64>;
}

/// `|eps - pred(z_t, t, z_m)|^2` with `z_t` the forward-noised `z0`.
pub fn diffusion_loss(
    pred: &dyn EpsilonPredictor,
    z0: &[f64],
    z_m: &[f64],
    t: usize,
    schedule: &NoiseSchedule,
    eps: &[f64],
) -> f64 {
    let z_t = diffuse_forward(z0, t, schedule, eps);
    let out = pred.predict(&z_t, t, z_m);
    eps.iter().zip(&out).map(|(e, o)| (e - o).powi(2)).sum()
}

/// Time-conditional two-layer network with a residual connection:
/// `u = P [z_t; z_m; emb(t)] + p`, `v = u + silu(W u + b)`, `out = O v + o`.
/// All weights live in one flat parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualMlp {
    pub latent: usize,
    pub cond: usize,
    pub time_dim: usize,
    pub width: usize,
    pub params: Vec<f64>,
}

struct Cache {
    x: Vec<f64>,
    u: Vec<f64>,
    a: Vec<f64>,
    v: Vec<f64>,
    out: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn matvec(m: &[f64], rows: usize, cols: usize, x: &[f64], bias: &[f64]) -> Vec<f64> {
    (0..rows).map(|r| bias[r] + m[r * cols..(r + 1) * cols].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()).collect()
}

impl ResidualMlp {
    pub fn param_count(latent: usize, cond: usize, time_dim: usize, width: usize) -> usize {
        let input = latent + cond + time_dim;
        width * input + width + width * width + width + latent * width + latent
    }

    /// Gaussian weights scaled by `1 / sqrt(fan_in)`, zero biases.
    pub fn new(latent: usize, cond: usize, time_dim: usize, width: usize, seed: u64) -> ResidualMlp {
        let mut m = ResidualMlp {
            latent,
            cond,
            time_dim,
            width,
            params: vec![0.0; Self::param_count(latent, cond, time_dim, width)],
        };
        let mut rng = par::rng_from(seed, &[]);
        let input = latent + cond + time_dim;
        let (p, w, o) = m.offsets();
        let fill = |slice: &mut [f64], fan_in: usize, rng: &mut rand_chacha::ChaCha8Rng| {
            let s = 1.0 / (fan_in as f64).sqrt();
            for x in slice {
                let g: f64 = StandardNormal.sample(rng);
                *x = g * s;
            }
        };
        fill(&mut m.params[p..p + width * input], input, &mut rng);
        fill(&mut m.params[w..w + width * width], width, &mut rng);
        fill(&mut m.params[o..o + latent * width], width, &mut rng);
        m
    }

    /// Start offsets of the three weight matrices; each bias follows its matrix.
    fn offsets(&self) -> (usize, usize, usize) {
        let input = self.latent + self.cond + self.time_dim;
        let p = 0;
        let w = p + self.width * input + self.width;
        let o = w + self.width * self.width + self.width;
        (p, w, o)
    }

    /// Sinusoidal embedding of the step index.
    pub fn time_embedding(&self, t: usize) -> Vec<f64> {
        let half = self.time_dim / 2;
        let mut e = Vec::with_capacity(self.time_dim);
        for k in 0..self.time_dim {
            let i = k % half.max(1);
            let freq = 1.0 / 10000f64.powf(i as f64 / half.max(1) as f64);
            e.push(if k < half { (t as f64 * freq).sin() } else { (t as f64 * freq).cos() });
        }
        e
    }

    fn forward(&self, z_t: &[f64], t: usize, z_m: &[f64]) -> Cache {
        assert_eq!(z_t.len(), self.latent, "latent dimension");
        assert_eq!(z_m.len(), self.cond, "conditioning dimension");
        let input = self.latent + self.cond + self.time_dim;
        let (p, w, o) = self.offsets();
        let mut x = Vec::with_capacity(input);
        x.extend_from_slice(z_t);
        x.extend_from_slice(z_m);
        x.extend(self.time_embedding(t));
        let pr = &self.params;
        let wd = self.width;
        let u = matvec(&pr[p..], wd, input, &x, &pr[p + wd * input..]);
        let a = matvec(&pr[w..], wd, wd, &u, &pr[w + wd * wd..]);
        let v: Vec<f64> = u.iter().zip(&a).map(|(u, a)| u + a * sigmoid(*a)).collect();
        let out = matvec(&pr[o..], self.latent, wd, &v, &pr[o + self.latent * wd..]);
        Cache { x, u, a, v, out }
    }

    /// Gradient of `dL/dout . out` with respect to the parameters.
    fn backward(&self, c: &Cache, dout: &[f64]) -> Vec<f64> {
        let input = c.x.len();
        let wd = self.width;
        let (p, w, o) = self.offsets();
        let pr = &self.params;
        let mut g = vec![0.0; pr.len()];
        let mut dv = vec![0.0; wd];
        for r in 0..self.latent {
            for k in 0..wd {
                g[o + r * wd + k] = dout[r] * c.v[k];
                dv[k] += pr[o + r * wd + k] * dout[r];
            }
            g[o + self.latent * wd + r] = dout[r];
        }
        let da: Vec<f64> = c
            .a
            .iter()
            .zip(&dv)
            .map(|(&a, &d)| {
                let s = sigmoid(a);
                d * s * (1.0 + a * (1.0 - s))
            })
            .collect();
        let mut du = dv.clone();
        for r in 0..wd {
            for k in 0..wd {
                g[w + r * wd + k] = da[r] * c.u[k];
                du[k] += pr[w + r * wd + k] * da[r];
            }
            g[w + wd * wd + r] = da[r];
        }
        for r in 0..wd {
            for k in 0..input {
                g[p + r * input + k] = du[r] * c.x[k];
            }
            g[p + wd * input + r] = du[r];
        }
        g
    }
}

impl EpsilonPredictor for ResidualMlp {
    fn predict(&self, z_t: &[f64], t: usize, z_m: &[f64]) -> Vec<f64> {
        self.forward(z_t, t, z_m).out
    }
}

/// Loss and its gradient with respect to `mlp.params`.
pub fn diffusion_loss_and_grad(
    mlp: &ResidualMlp,
    z0: &[f64],
    z_m: &[f64],
    t: usize,
    schedule: &NoiseSchedule,
    eps: &[f64],
) -> (f64, Vec<f64>) {
    let z_t = diffuse_forward(z0, t, schedule, eps);
    let c = mlp.forward(&z_t, t, z_m);
    let resid: Vec<f64> = c.out.iter().zip(eps).map(|(o, e)| o - e).collect();
    let loss = resid.iter().map(|r| r * r).sum();
    let dout: Vec<f64> = resid.iter().map(|r| 2.0 * r).collect();
    (loss, mlp.backward(&c, &dout))
}
