use crate::geom::PointCloud;

use super::{malformed, FormatError};

/// Formats with 9 significant digits.
fn sig9(v: f64) -> String {
    format!("{v:.8e}")
}

/// One point per line, `x y z` or `x y z nx ny nz`.
pub fn write_xyz(pc: &PointCloud) -> String {
    let mut out = String::new();
    for (i, p) in pc.points.iter().enumerate() {
        let mut vals: Vec<f64> = p.to_vec();
        if let Some(ns) = &pc.normals {
            vals.extend_from_slice(&ns[i]);
        }
        let line: Vec<String> = vals.into_iter().map(sig9).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Blank lines and `#` comments are skipped. Normals are kept only when
/// every line has six columns.
pub fn read_xyz(bytes: &[u8]) -> Result<PointCloud, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|_| malformed("XYZ file is not UTF-8"))?;
    let mut points = Vec::new();
    let mut normals = Vec::new();
    let mut all_normals = true;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).map(str::parse).collect();
        let vals = vals.map_err(|_| malformed(format!("line {}: not numeric", n + 1)))?;
        if vals.len() < 3 {
            return Err(malformed(format!("line {}: expected at least 3 values", n + 1)));
        }
        points.push([vals[0], vals[1], vals[2]]);
        if vals.len() >= 6 {
            normals.push([vals[3], vals[4], vals[5]]);
        } else {
            all_normals = false;
        }
    }
    if points.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(PointCloud { points, normals: all_normals.then_some(normals), seed: None, source_id: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        let pc = PointCloud {
            points: vec![[1.0 / 3.0, -123456.789, 0.0]],
            normals: Some(vec![[0.0, 1.0, 0.0]]),
            ..Default::default()
        };
        let text = write_xyz(&pc);
        assert!(text.starts_with("3.33333333e-1 -1.23456789e5 0.00000000e0 "));
        let back = read_xyz(text.as_bytes()).unwrap();
        assert!((back.points[0][0] - 1.0 / 3.0).abs() < 1e-9);
        assert_eq!(back.normals.unwrap()[0], [0.0, 1.0, 0.0]);
    }

    #[test]
    fn mixed_columns_drop_normals() {
        let pc = read_xyz(b"# scan\n0 0 0 0 0 1\n1 2 3\n").unwrap();
        assert_eq!(pc.len(), 2);
        assert!(pc.normals.is_none());
        assert!(matches!(read_xyz(b"\n# only\n"), Err(FormatError::Empty)));
        assert!(read_xyz(b"1 2\n").is_err());
    }
}
