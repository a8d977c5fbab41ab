use crate::cadlang::{CommandKind, QuantizedMatrix, N_ROWS};

/// Parameter tolerance in quantization units (strict `<`).
pub const DEFAULT_ETA: i16 = 3;

/// Which matrix rows enter the comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RowScope {
    /// All 60 rows, EOS padding included.
    #[default]
    All,
    /// Rows before the later of the two sequences' first EOS.
    Content,
}

fn rows(gt: &QuantizedMatrix, pred: &QuantizedMatrix, scope: RowScope) -> usize {
    match scope {
        RowScope::All => N_ROWS,
        RowScope::Content => gt.content_rows().max(pred.content_rows()),
    }
}

/// Fraction of compared rows whose command type matches.
pub fn command_accuracy(gt: &QuantizedMatrix, pred: &QuantizedMatrix, scope: RowScope) -> f64 {
    let n = rows(gt, pred, scope);
    if n == 0 {
        return 1.0;
    }
    let hits = (0..n).filter(|&k| gt.get(k, 0) == pred.get(k, 0)).count();
    hits as f64 / n as f64
}

/// Over rows with matching command type, the fraction of that command's
/// used slots with `|p - p_hat| < eta`. `None` when no row matches or the
/// matching rows use no slots.
pub fn param_accuracy(gt: &QuantizedMatrix, pred: &QuantizedMatrix, eta: i16, scope: RowScope) -> Option<f64> {
    let mut total = 0usize;
    let mut hits = 0usize;
    for k in 0..rows(gt, pred, scope) {
        let t = gt.get(k, 0);
        if t != pred.get(k, 0) {
            continue;
        }
        let Some(kind) = CommandKind::from_index(t as i64) else { continue };
        for &s in kind.used_slots() {
            total += 1;
            let (a, b) = (gt.get(k, 1 + s), pred.get(k, 1 + s));
            if (a as i32 - b as i32).abs() < eta as i32 {
                hits += 1;
            }
        }
    }
    (total > 0).then(|| hits as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cadlang::to_matrix;
    use crate::fixture;

    #[test]
    fn hand_counts() {
        let gt = to_matrix(&fixture::cylinder()).unwrap();
        assert_eq!(command_accuracy(&gt, &gt, RowScope::All), 1.0);
        assert_eq!(param_accuracy(&gt, &gt, DEFAULT_ETA, RowScope::All), Some(1.0));
        let empty = QuantizedMatrix::default();
        assert_eq!(command_accuracy(&gt, &empty, RowScope::All), 57.0 / 60.0);
        assert_eq!(command_accuracy(&gt, &empty, RowScope::Content), 0.0);

        let cube = to_matrix(&fixture::unit_cube()).unwrap();
        let mut wrong = cube.clone();
        wrong.set(2, 0, CommandKind::Arc.index());
        assert_eq!(command_accuracy(&cube, &wrong, RowScope::All), 59.0 / 60.0);
    }

    #[test]
    fn tolerance_is_strict() {
        let gt = to_matrix(&fixture::cylinder()).unwrap();
        let mut p = gt.clone();
        p.set(1, 1 + crate::cadlang::SLOT_R, gt.get(1, 1 + crate::cadlang::SLOT_R) + DEFAULT_ETA - 1);
        assert_eq!(param_accuracy(&gt, &p, DEFAULT_ETA, RowScope::All), Some(1.0));
        p.set(1, 1 + crate::cadlang::SLOT_R, gt.get(1, 1 + crate::cadlang::SLOT_R) + DEFAULT_ETA);
        // Circle uses x, y, r; extrude uses 11 slots.
        assert_eq!(param_accuracy(&gt, &p, DEFAULT_ETA, RowScope::All), Some(13.0 / 14.0));
    }

    #[test]
    fn undefined_without_matching_rows() {
        let gt = to_matrix(&fixture::cylinder()).unwrap();
        let mut p = QuantizedMatrix::default();
        for k in 0..3 {
            p.set(k, 0, CommandKind::Line.index());
        }
        assert_eq!(param_accuracy(&gt, &p, DEFAULT_ETA, RowScope::Content), None);
    }
}
