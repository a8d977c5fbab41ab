use std::collections::BTreeMap;

use serde::Serialize;

use super::{sl_normalize, Statistic};

/// Per-program evaluation result. `None` marks an undefined value, which is
/// left out of every statistic.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ItemMetrics {
    pub len: usize,
    pub cmd_acc: Option<f64>,
    pub param_acc: Option<f64>,
    pub cd: Option<f64>,
    pub iou: Option<f64>,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    /// Sequence length, `ALL` or `SL_NORM`.
    pub len: String,
    pub count: usize,
    pub cmd_acc: Option<f64>,
    pub param_acc: Option<f64>,
    pub cd_median: Option<f64>,
    pub iou_mean: Option<f64>,
    pub ir: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportConfig {
    pub eta: i16,
    pub content_rows_only: bool,
    pub chamfer_points: usize,
    pub iou_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub config: ReportConfig,
    pub rows: Vec<ReportRow>,
}

type Column = (fn(&ItemMetrics) -> Option<f64>, Statistic);

const COLUMNS: [Column; 5] = [
    (|m| m.cmd_acc, Statistic::Mean),
    (|m| m.param_acc, Statistic::Mean),
    (|m| m.cd, Statistic::Median),
    (|m| m.iou, Statistic::Mean),
    (|m| Some(if m.valid { 0.0 } else { 1.0 }), Statistic::Mean),
];

fn row(label: String, items: &[&ItemMetrics]) -> ReportRow {
    let v: Vec<Option<f64>> = COLUMNS
        .iter()
        .map(|(get, stat)| stat.of(&items.iter().filter_map(|m| get(m)).collect::<Vec<_>>()))
        .collect();
    ReportRow { len: label, count: items.len(), cmd_acc: v[0], param_acc: v[1], cd_median: v[2], iou_mean: v[3], ir: v[4] }
}

impl MetricsReport {
    /// One row per sequence length, then the unnormalized `ALL` row and the
    /// `SL_NORM` row (mean of the per-length rows; its count is the number
    /// of lengths).
    pub fn build(items: &[ItemMetrics], config: ReportConfig) -> MetricsReport {
        let mut by_len: BTreeMap<usize, Vec<&ItemMetrics>> = BTreeMap::new();
        for m in items {
            by_len.entry(m.len).or_default().push(m);
        }
        let mut rows: Vec<ReportRow> = by_len.iter().map(|(l, ms)| row(l.to_string(), ms)).collect();
        rows.push(row("ALL".into(), &items.iter().collect::<Vec<_>>()));
        let sl: Vec<Option<f64>> = COLUMNS
            .iter()
            .map(|(get, stat)| {
                let per_item: Vec<(usize, Option<f64>)> = items.iter().map(|m| (m.len, get(m))).collect();
                sl_normalize(&per_item, *stat).ok().map(|r| r.sl)
            })
            .collect();
        rows.push(ReportRow {
            len: "SL_NORM".into(),
            count: by_len.len(),
            cmd_acc: sl[0],
            param_acc: sl[1],
            cd_median: sl[2],
            iou_mean: sl[3],
            ir: sl[4],
        });
        MetricsReport { config, rows }
    }

    pub fn row(&self, label: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.len == label)
    }

    /// CSV table; each entry of `comments` is written first as a `# ` line.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str("len,count,cmd_acc,param_acc,cd_median,iou_mean,ir\n");
        let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.len,
                r.count,
                f(r.cmd_acc),
                f(r.param_acc),
                f(r.cd_median),
                f(r.iou_mean),
                f(r.ir)
            ));
        }
        out
    }
}
