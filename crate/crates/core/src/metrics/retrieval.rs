use std::collections::HashMap;

use rand::seq::index;
use serde::Serialize;

use crate::par::{self, Exec};

use super::MetricError;

/// Embeddings of one modality, all of the same dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingSet {
    pub ids: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
    pub modality: String,
}

impl EmbeddingSet {
    pub fn new(ids: Vec<String>, vectors: Vec<Vec<f64>>, modality: String) -> Result<EmbeddingSet, MetricError> {
        if ids.len() != vectors.len() {
            return Err(MetricError::DimensionMismatch(ids.len(), vectors.len()));
        }
        if let Some(first) = vectors.first() {
            if let Some(v) = vectors.iter().find(|v| v.len() != first.len()) {
                return Err(MetricError::DimensionMismatch(first.len(), v.len()));
            }
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(MetricError::NonFinite);
        }
        Ok(EmbeddingSet { ids, vectors, modality })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }
}

/// `(query index, library index)` for every id present in both sets.
/// Errors when the id sets differ.
pub fn pair_by_id(queries: &EmbeddingSet, library: &EmbeddingSet) -> Result<Vec<(usize, usize)>, MetricError> {
    let lib: HashMap<&str, usize> = library.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut missing = Vec::new();
    let mut pairs = Vec::with_capacity(queries.len());
    for (i, id) in queries.ids.iter().enumerate() {
        match lib.get(id.as_str()) {
            Some(&j) => pairs.push((i, j)),
            None => missing.push(format!("query-only {id}")),
        }
    }
    let q: std::collections::HashSet<&str> = queries.ids.iter().map(String::as_str).collect();
    missing.extend(library.ids.iter().filter(|id| !q.contains(id.as_str())).map(|id| format!("library-only {id}")));
    if !missing.is_empty() {
        missing.truncate(20);
        return Err(MetricError::IdMismatch(missing.join(", ")));
    }
    Ok(pairs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RetrievalResult {
    pub top_n: usize,
    pub batch: usize,
    pub trials: usize,
    pub accuracy: f64,
    /// Standard error of the mean over trials.
    pub std_error: f64,
    pub per_trial: Vec<f64>,
}

fn unit(v: &[f64]) -> Result<Vec<f64>, MetricError> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(MetricError::ZeroVector);
    }
    Ok(v.iter().map(|x| x / n).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Top-N retrieval. Each trial draws `batch` distinct pairs; every query in
/// the batch ranks the batch's library entries by cosine similarity and
/// succeeds when fewer than `top_n` entries score strictly higher than its
/// true match. The trial score is the batch success rate; the result is the
/// mean over trials.
pub fn retrieval_topn(
    queries: &EmbeddingSet,
    library: &EmbeddingSet,
    pairs: &[(usize, usize)],
    top_n: usize,
    batch: usize,
    trials: usize,
    seed: u64,
) -> Result<RetrievalResult, MetricError> {
    retrieval_topn_with(queries, library, pairs, top_n, batch, trials, seed, Exec::default())
}

#[allow(clippy::too_many_arguments)]
pub fn retrieval_topn_with(
    queries: &EmbeddingSet,
    library: &EmbeddingSet,
    pairs: &[(usize, usize)],
    top_n: usize,
    batch: usize,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<RetrievalResult, MetricError> {
    if queries.dim() != library.dim() {
        return Err(MetricError::DimensionMismatch(queries.dim(), library.dim()));
    }
    if batch == 0 || trials == 0 || pairs.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    if batch > pairs.len() {
        return Err(MetricError::BatchTooLarge { batch, available: pairs.len() });
    }
    let q: Vec<Vec<f64>> = pairs.iter().map(|&(i, _)| unit(&queries.vectors[i])).collect::<Result<_, _>>()?;
    let l: Vec<Vec<f64>> = pairs.iter().map(|&(_, j)| unit(&library.vectors[j])).collect::<Result<_, _>>()?;
    let per_trial = par::map_indexed(exec, trials, |t| {
        let mut rng = par::rng_from(seed, &[t as u64]);
        let chosen = index::sample(&mut rng, pairs.len(), batch).into_vec();
        let hits = chosen
            .iter()
            .filter(|&&a| {
                let truth = dot(&q[a], &l[a]);
                let better = chosen.iter().filter(|&&b| b != a && dot(&q[a], &l[b]) > truth).count();
                better < top_n
            })
            .count();
        hits as f64 / batch as f64
    });
    let mean = per_trial.iter().sum::<f64>() / trials as f64;
    let var = if trials > 1 {
        per_trial.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
    } else {
        0.0
    };
    Ok(RetrievalResult {
        top_n,
        batch,
        trials,
        accuracy: mean,
        std_error: (var / trials as f64).sqrt(),
        per_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(vs: Vec<Vec<f64>>) -> EmbeddingSet {
        let ids = (0..vs.len()).map(|i| format!("p{i}")).collect();
        EmbeddingSet::new(ids, vs, "test".into()).unwrap()
    }

    #[test]
    fn identical_embeddings_always_hit() {
        let vs: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64).sin(), (i as f64).cos(), 0.3]).collect();
        let a = set(vs);
        let pairs = pair_by_id(&a, &a).unwrap();
        let r = retrieval_topn(&a, &a, &pairs, 1, 16, 20, 1).unwrap();
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn validates_inputs() {
        let a = set(vec![vec![1.0, 0.0]; 4]);
        let b = set(vec![vec![1.0, 0.0, 0.0]; 4]);
        let pairs = pair_by_id(&a, &a).unwrap();
        assert!(matches!(retrieval_topn(&a, &b, &pairs, 1, 2, 1, 0), Err(MetricError::DimensionMismatch(2, 3))));
        assert!(matches!(retrieval_topn(&a, &a, &pairs, 1, 5, 1, 0), Err(MetricError::BatchTooLarge { .. })));
        let mut c = a.clone();
        c.ids[0] = "other".into();
        assert!(matches!(pair_by_id(&a, &c), Err(MetricError::IdMismatch(_))));
        assert!(EmbeddingSet::new(vec!["x".into()], vec![vec![f64::NAN]], "m".into()).is_err());
    }
}
