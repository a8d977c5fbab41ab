use super::{dot, norm, LatentError};

/// `u . v / (|u| |v|)`.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, LatentError> {
    let (uu, vv) = (dot(u, u), dot(v, v));
    if uu == 0.0 || vv == 0.0 {
        return Err(LatentError::ZeroVector);
    }
    Ok((dot(u, v) / (uu * vv).sqrt()).clamp(-1.0, 1.0))
}

/// `B` CAD embeddings paired index-wise with `B` geometry embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct ContrastiveBatch {
    pub zc: Vec<Vec<f64>>,
    pub zm: Vec<Vec<f64>>,
    pub tau: f64,
}

impl ContrastiveBatch {
    pub fn new(zc: Vec<Vec<f64>>, zm: Vec<Vec<f64>>, tau: f64) -> Result<ContrastiveBatch, LatentError> {
        let d = zc.first().map_or(0, Vec::len);
        let ok = zc.len() >= 2
            && zc.len() == zm.len()
            && d > 0
            && zc.iter().chain(&zm).all(|v| v.len() == d)
            && tau > 0.0;
        if !ok {
            return Err(LatentError::BadBatch);
        }
        if zc.iter().chain(&zm).any(|v| norm(v) == 0.0) {
            return Err(LatentError::ZeroVector);
        }
        Ok(ContrastiveBatch { zc, zm, tau })
    }

    pub fn size(&self) -> usize {
        self.zc.len()
    }

    /// All `2B` embeddings: CAD first, then geometry.
    fn all(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.zc.iter().chain(&self.zm)
    }
}

struct Forward {
    units: Vec<Vec<f64>>,
    norms: Vec<f64>,
    /// Row `i` of the softmax over `k != i` of `s_ik / tau`.
    probs: Vec<Vec<f64>>,
    loss: f64,
}

fn forward(b: &ContrastiveBatch) -> Forward {
    let n = 2 * b.size();
    let norms: Vec<f64> = b.all().map(|v| norm(v)).collect();
    let units: Vec<Vec<f64>> = b.all().zip(&norms).map(|(v, &l)| v.iter().map(|x| x / l).collect()).collect();
    let mut probs = vec![vec![0.0; n]; n];
    let mut loss = 0.0;
    for i in 0..n {
        let logits: Vec<f64> = (0..n).map(|k| dot(&units[i], &units[k]) / b.tau).collect();
        let max = (0..n).filter(|&k| k != i).map(|k| logits[k]).fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = (0..n).filter(|&k| k != i).map(|k| (logits[k] - max).exp()).sum();
        for k in (0..n).filter(|&k| k != i) {
            probs[i][k] = (logits[k] - max).exp() / z;
        }
        let pos = (i + b.size()) % n;
        loss += max + z.ln() - logits[pos];
    }
    Forward { units, norms, probs, loss: loss / n as f64 }
}

/// Mean over the `2B` anchors (each CAD embedding paired with its geometry
/// counterpart and vice versa) of
/// `-log(exp(s_ij / tau) / sum_{k != i} exp(s_ik / tau))`, where `s` is
/// cosine similarity and `k` ranges over all `2B` embeddings.
pub fn infonce_loss(b: &ContrastiveBatch) -> f64 {
    forward(b).loss
}

/// Loss and its gradient with respect to every CAD and geometry embedding.
#[allow(clippy::needless_range_loop)]
pub fn infonce_gradient(b: &ContrastiveBatch) -> (f64, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let bs = b.size();
    let n = 2 * bs;
    let f = forward(b);
    let scale = 1.0 / (n as f64 * b.tau);
    // g[i][k] = dL/ds_ik, treating s_ik and s_ki as separate inputs.
    let mut g = f.probs.clone();
    for (i, row) in g.iter_mut().enumerate() {
        row[(i + bs) % n] -= 1.0;
        row.iter_mut().for_each(|x| *x *= scale);
    }
    let d = f.units[0].len();
    let mut grads = Vec::with_capacity(n);
    for i in 0..n {
        let mut gu = vec![0.0; d];
        for k in (0..n).filter(|&k| k != i) {
            let w = g[i][k] + g[k][i];
            for (a, x) in gu.iter_mut().zip(&f.units[k]) {
                *a += w * x;
            }
        }
        // Back through u / |u|: (I - u u^T) gu / |u|.
        let u = &f.units[i];
        let along = dot(u, &gu);
        grads.push(gu.iter().zip(u).map(|(gx, ux)| (gx - along * ux) / f.norms[i]).collect());
    }
    let gm = grads.split_off(bs);
    (f.loss, grads, gm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&[1.0, 2.0], &[1.0, 2.0]), Ok(1.0));
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 3.0]), Ok(0.0));
        assert_eq!(cosine_similarity(&[1.0, -2.0], &[-1.0, 2.0]), Ok(-1.0));
        assert_eq!(cosine_similarity(&[0.0, 0.0], &[1.0, 2.0]), Err(LatentError::ZeroVector));
    }

    #[test]
    fn identical_batch_gives_ln3() {
        let v = vec![vec![0.3, -0.4]; 2];
        let b = ContrastiveBatch::new(v.clone(), v, 1.0).unwrap();
        assert!((infonce_loss(&b) - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn separated_pairs_vanish_as_tau_shrinks() {
        let zc = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let b = ContrastiveBatch::new(zc.clone(), zc, 0.01).unwrap();
        assert!(infonce_loss(&b) < 1e-40);
    }

    #[test]
    fn rejects_bad_batches() {
        assert_eq!(ContrastiveBatch::new(vec![vec![1.0]], vec![vec![1.0]], 1.0), Err(LatentError::BadBatch));
        let two = vec![vec![1.0, 0.0]; 2];
        assert_eq!(ContrastiveBatch::new(two.clone(), two.clone(), 0.0), Err(LatentError::BadBatch));
        assert_eq!(
            ContrastiveBatch::new(two, vec![vec![0.0, 0.0], vec![1.0, 0.0]], 1.0),
            Err(LatentError::ZeroVector)
        );
    }
}
