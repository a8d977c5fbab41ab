use std::collections::BTreeMap;

use serde::Serialize;

use crate::cadlang::CadProgram;
use crate::geom::quick_valid;
use crate::par::{self, Exec};

use super::MetricError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    #[default]
    Mean,
    Median,
}

impl Statistic {
    /// `None` for an empty slice.
    pub fn of(self, values: &[f64]) -> Option<f64> {
        if values.is_empty() {
            return None;
        }
        Some(match self {
            Statistic::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Statistic::Median => {
                let mut v = values.to_vec();
                v.sort_by(f64::total_cmp);
                let m = v.len() / 2;
                if v.len() % 2 == 1 {
                    v[m]
                } else {
                    (v[m - 1] + v[m]) / 2.0
                }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlNormalized {
    /// Statistic over all defined items.
    pub all: f64,
    /// Mean over lengths of the per-length statistic.
    pub sl: f64,
    pub per_length: BTreeMap<usize, f64>,
}

/// Sequence-length normalization. Undefined items are dropped; lengths left
/// without defined items do not count towards the mean.
pub fn sl_normalize(items: &[(usize, Option<f64>)], stat: Statistic) -> Result<SlNormalized, MetricError> {
    let mut buckets: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut defined = Vec::with_capacity(items.len());
    for &(len, v) in items {
        if let Some(v) = v {
            buckets.entry(len).or_default().push(v);
            defined.push(v);
        }
    }
    let all = stat.of(&defined).ok_or(MetricError::EmptyInput)?;
    let per_length: BTreeMap<usize, f64> =
        buckets.into_iter().map(|(l, vs)| (l, stat.of(&vs).expect("bucket is non-empty"))).collect();
    let sl = per_length.values().sum::<f64>() / per_length.len() as f64;
    Ok(SlNormalized { all, sl, per_length })
}

/// `(p1 - p2) / (1 - p2)`: the share of `p2`'s error that `p1` removes.
pub fn relative_improvement(p1: f64, p2: f64) -> Result<f64, MetricError> {
    if p2 == 1.0 {
        return Err(MetricError::DivisionByZero);
    }
    Ok((p1 - p2) / (1.0 - p2))
}

/// Fraction of programs whose validity report is not fully true.
pub fn invalid_ratio(programs: &[CadProgram]) -> Result<f64, MetricError> {
    invalid_ratio_with(programs, Exec::default())
}

pub fn invalid_ratio_with(programs: &[CadProgram], exec: Exec) -> Result<f64, MetricError> {
    if programs.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let bad = par::map_slice(exec, programs, |p| !quick_valid(p)).into_iter().filter(|&b| b).count();
    Ok(bad as f64 / programs.len() as f64)
}
