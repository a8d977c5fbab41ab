use std::fmt::Write as _;

use crate::geom::{PointCloud, P3};

use super::{malformed, FormatError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlyEncoding {
    Ascii,
    BinaryLittleEndian,
}

/// Serializes `x y z [nx ny nz]` as doubles. `comments` become header
/// comment lines.
pub fn write_ply(pc: &PointCloud, encoding: PlyEncoding, comments: &[String]) -> Vec<u8> {
    let mut header = String::from("ply\n");
    header.push_str(match encoding {
        PlyEncoding::Ascii => "format ascii 1.0\n",
        PlyEncoding::BinaryLittleEndian => "format binary_little_endian 1.0\n",
    });
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(header, "comment {line}");
        }
    }
    if let Some(seed) = pc.seed {
        let _ = writeln!(header, "comment seed {seed}");
    }
    if let Some(id) = &pc.source_id {
        let _ = writeln!(header, "comment source {id}");
    }
    let _ = writeln!(header, "element vertex {}", pc.len());
    let names: &[&str] = if pc.normals.is_some() { &["x", "y", "z", "nx", "ny", "nz"] } else { &["x", "y", "z"] };
    for n in names {
        let _ = writeln!(header, "property double {n}");
    }
    header.push_str("end_header\n");

    let mut out = header.into_bytes();
    for i in 0..pc.len() {
        let mut row: Vec<f64> = pc.points[i].to_vec();
        if let Some(ns) = &pc.normals {
            row.extend_from_slice(&ns[i]);
        }
        match encoding {
            PlyEncoding::Ascii => {
                let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
            PlyEncoding::BinaryLittleEndian => {
                for v in row {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(s: &str) -> Option<Scalar> {
        Some(match s {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

struct Header {
    binary: bool,
    count: usize,
    props: Vec<(String, Scalar)>,
    seed: Option<u64>,
    source: Option<String>,
    body: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header, FormatError> {
    let end = bytes
        .windows(11)
        .position(|w| w == b"end_header\n")
        .ok_or_else(|| malformed("missing end_header"))?;
    let text = std::str::from_utf8(&bytes[..end]).map_err(|_| malformed("header is not UTF-8"))?;
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    if lines.next() != Some("ply") {
        return Err(malformed("not a PLY file"));
    }
    let mut h = Header { binary: false, count: 0, props: vec![], seed: None, source: None, body: end + 11 };
    let mut format_seen = false;
    // Only the first element (vertices) is read; properties of later
    // elements are ignored.
    let mut in_vertex = false;
    let mut seen_vertex = false;
    for line in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["format", "ascii", _] => (h.binary, format_seen) = (false, true),
            ["format", "binary_little_endian", _] => (h.binary, format_seen) = (true, true),
            ["format", other, _] => return Err(malformed(format!("unsupported PLY format {other}"))),
            ["comment", "seed", s] => h.seed = s.parse().ok(),
            ["comment", "source", rest @ ..] => h.source = Some(rest.join(" ")),
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, n] => {
                if seen_vertex {
                    in_vertex = false;
                    continue;
                }
                if *name != "vertex" {
                    return Err(malformed(format!("expected vertex element first, found {name}")));
                }
                h.count = n.parse().map_err(|_| malformed(format!("bad vertex count {n}")))?;
                in_vertex = true;
                seen_vertex = true;
            }
            ["property", "list", ..] if in_vertex => return Err(malformed("list property on vertices")),
            ["property", ty, name] if in_vertex => {
                let s = Scalar::parse(ty).ok_or_else(|| malformed(format!("unknown property type {ty}")))?;
                h.props.push((name.to_string(), s));
            }
            ["property", ..] => {}
            _ => return Err(malformed(format!("unexpected header line: {line}"))),
        }
    }
    if !format_seen || !seen_vertex {
        return Err(malformed("header lacks format or vertex element"));
    }
    Ok(h)
}

pub fn read_ply(bytes: &[u8]) -> Result<PointCloud, FormatError> {
    let h = parse_header(bytes)?;
    let col = |n: &str| h.props.iter().position(|(p, _)| p == n);
    let xyz = [col("x"), col("y"), col("z")];
    let [Some(x), Some(y), Some(z)] = xyz else {
        return Err(malformed("vertex element lacks x, y or z"));
    };
    let normal_cols = match [col("nx"), col("ny"), col("nz")] {
        [Some(a), Some(b), Some(c)] => Some([a, b, c]),
        _ => None,
    };
    let rows: Vec<Vec<f64>> = if h.binary {
        let stride: usize = h.props.iter().map(|(_, s)| s.size()).sum();
        let body = &bytes[h.body..];
        if body.len() < stride * h.count {
            return Err(malformed("binary body shorter than declared vertex count"));
        }
        (0..h.count)
            .map(|i| {
                let mut off = i * stride;
                h.props
                    .iter()
                    .map(|(_, s)| {
                        let v = s.read_le(&body[off..]);
                        off += s.size();
                        v
                    })
                    .collect()
            })
            .collect()
    } else {
        let text = std::str::from_utf8(&bytes[h.body..]).map_err(|_| malformed("body is not UTF-8"))?;
        let mut out = Vec::with_capacity(h.count);
        for line in text.lines().filter(|l| !l.trim().is_empty()).take(h.count) {
            let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
            let vals = vals.map_err(|_| malformed(format!("bad vertex line: {line}")))?;
            if vals.len() < h.props.len() {
                return Err(malformed(format!("short vertex line: {line}")));
            }
            out.push(vals);
        }
        if out.len() < h.count {
            return Err(malformed("fewer vertex lines than declared"));
        }
        out
    };
    if rows.is_empty() {
        return Err(FormatError::Empty);
    }
    let points: Vec<P3> = rows.iter().map(|r| [r[x], r[y], r[z]]).collect();
    let normals = normal_cols.map(|[a, b, c]| rows.iter().map(|r| [r[a], r[b], r[c]]).collect());
    Ok(PointCloud { points, normals, seed: h.seed, source_id: h.source })
}
