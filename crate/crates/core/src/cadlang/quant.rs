//! 8-bit parameter grid. Every continuous parameter is stored as an integer
//! in `0..=255`; this module fixes what each grid value means.
//!
//! | kind          | value of `v`            | range                 |
//! |---------------|-------------------------|-----------------------|
//! | `Coordinate`  | `(v - 128) / 128`       | `[-1, 0.9921875]`     |
//! | `Distance`    | `(v - 128) / 128`       | `[-1, 0.9921875]`     |
//! | `Orientation` | `(v - 128) * pi / 128`  | `[-pi, pi)`           |
//! | `Sweep`       | `v * 2 pi / 256`        | `[0, 2 pi)`           |
//! | `Radius`      | `v / 128`               | `[0, 1.9921875]`      |
//! | `Scale`       | `v / 128`               | `[0, 1.9921875]`      |
//!
//! Orientation values 64, 128 and 192 are exactly -90, 0 and +90 degrees.

use std::f64::consts::PI;

use super::CadError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParamKind {
    Coordinate,
    Distance,
    Orientation,
    Sweep,
    Radius,
    Scale,
}

impl ParamKind {
    pub const ALL: [ParamKind; 6] = [
        ParamKind::Coordinate,
        ParamKind::Distance,
        ParamKind::Orientation,
        ParamKind::Sweep,
        ParamKind::Radius,
        ParamKind::Scale,
    ];

    fn affine(self) -> (f64, f64) {
        // real = (v - offset) * step
        match self {
            ParamKind::Coordinate | ParamKind::Distance => (128.0, 1.0 / 128.0),
            ParamKind::Orientation => (128.0, PI / 128.0),
            ParamKind::Sweep => (0.0, 2.0 * PI / 256.0),
            ParamKind::Radius | ParamKind::Scale => (0.0, 1.0 / 128.0),
        }
    }

    /// Width of one grid step in real units.
    pub fn step(self) -> f64 {
        self.affine().1
    }
}

pub fn dequantize(v: i64, kind: ParamKind) -> Result<f64, CadError> {
    if !(0..=255).contains(&v) {
        return Err(CadError::Range { field: format!("{kind:?}"), value: v });
    }
    Ok(dequantize_u8(v as u8, kind))
}

#[inline]
pub fn dequantize_u8(v: u8, kind: ParamKind) -> f64 {
    let (offset, step) = kind.affine();
    (f64::from(v) - offset) * step
}

/// Nearest grid value, clamped to `0..=255`. Sweep angles wrap modulo 2 pi.
pub fn quantize(x: f64, kind: ParamKind) -> u8 {
    let (offset, step) = kind.affine();
    let mut q = (x / step + offset).round();
    if kind == ParamKind::Sweep {
        q = q.rem_euclid(256.0);
    }
    q.clamp(0.0, 255.0) as u8
}

/// `(sin, cos)` of an orientation grid value, exact at quarter turns.
pub fn orientation_sincos(v: u8) -> (f64, f64) {
    match v {
        0 => (0.0, -1.0),
        64 => (-1.0, 0.0),
        128 => (0.0, 1.0),
        192 => (1.0, 0.0),
        _ => dequantize_u8(v, ParamKind::Orientation).sin_cos(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_endpoints() {
        assert_eq!(dequantize(0, ParamKind::Coordinate).unwrap(), -1.0);
        let top = dequantize(255, ParamKind::Coordinate).unwrap();
        assert!((1.0 - top).abs() <= ParamKind::Coordinate.step());
        assert_eq!(dequantize(128, ParamKind::Coordinate).unwrap(), 0.0);
    }

    #[test]
    fn grid_closure_all_kinds() {
        for kind in ParamKind::ALL {
            for v in 0..=255u8 {
                assert_eq!(quantize(dequantize_u8(v, kind), kind), v, "{kind:?} {v}");
            }
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(dequantize(256, ParamKind::Radius), Err(CadError::Range { .. })));
        assert!(dequantize(-1, ParamKind::Coordinate).is_err());
    }

    #[test]
    fn sweep_range() {
        assert_eq!(dequantize(0, ParamKind::Sweep).unwrap(), 0.0);
        assert!(dequantize(255, ParamKind::Sweep).unwrap() < 2.0 * PI);
        assert_eq!(quantize(2.0 * PI, ParamKind::Sweep), 0);
    }

    #[test]
    fn quarter_turns_exact() {
        for v in [0u8, 64, 128, 192] {
            let (s, c) = orientation_sincos(v);
            let a = dequantize_u8(v, ParamKind::Orientation);
            assert!((s - a.sin()).abs() < 1e-15 && (c - a.cos()).abs() < 1e-15);
        }
    }
}
