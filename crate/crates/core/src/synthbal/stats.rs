use std::collections::BTreeMap;

use serde::Serialize;

/// One row of a sequence-length histogram.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    pub len: usize,
    pub count: usize,
    pub share: f64,
    /// Share of programs with length at most `len`.
    pub cum_share: f64,
    /// `log10(count)`, for log-scale plots.
    pub log10_count: f64,
}

pub fn length_histogram(lengths: impl IntoIterator<Item = usize>) -> Vec<HistogramRow> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for l in lengths {
        *counts.entry(l).or_default() += 1;
    }
    let total: usize = counts.values().sum();
    let mut cum = 0;
    counts
        .into_iter()
        .map(|(len, count)| {
            cum += count;
            HistogramRow {
                len,
                count,
                share: count as f64 / total as f64,
                cum_share: cum as f64 / total as f64,
                log10_count: (count as f64).log10(),
            }
        })
        .collect()
}

/// Share of programs with length at most `len`.
pub fn share_at_most(rows: &[HistogramRow], len: usize) -> f64 {
    rows.iter().take_while(|r| r.len <= len).last().map_or(0.0, |r| r.cum_share)
}

/// Share of programs with length exactly `len`.
pub fn share_of(rows: &[HistogramRow], len: usize) -> f64 {
    rows.iter().find(|r| r.len == len).map_or(0.0, |r| r.share)
}
