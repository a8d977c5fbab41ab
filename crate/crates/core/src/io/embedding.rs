use serde::{Deserialize, Serialize};

use crate::metrics::EmbeddingSet;

use super::{malformed, FormatError};

pub const EMBEDDING_MAGIC: &[u8; 4] = b"EMB1";

#[derive(Serialize, Deserialize)]
struct Manifest {
    modality: String,
    ids: Vec<String>,
}

/// Binary vectors (`EMB1`, count and dim as LE u32, then LE f32 row-major)
/// and the JSON id manifest that accompanies them.
pub fn write_embeddings(set: &EmbeddingSet) -> (Vec<u8>, String) {
    let dim = set.dim();
    let mut out = Vec::with_capacity(12 + 4 * dim * set.len());
    out.extend_from_slice(EMBEDDING_MAGIC);
    out.extend_from_slice(&(set.len() as u32).to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    for v in &set.vectors {
        for x in v {
            out.extend_from_slice(&(*x as f32).to_le_bytes());
        }
    }
    let manifest = Manifest { modality: set.modality.clone(), ids: set.ids.clone() };
    (out, serde_json::to_string_pretty(&manifest).expect("manifest serializes"))
}

pub fn read_embeddings(bytes: &[u8], manifest: &str) -> Result<EmbeddingSet, FormatError> {
    if bytes.len() < 12 || &bytes[..4] != EMBEDDING_MAGIC {
        return Err(malformed("missing EMB1 header"));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let (count, dim) = (word(4), word(8));
    let body = &bytes[12..];
    if body.len() != 4 * count * dim {
        return Err(malformed(format!("expected {count}x{dim} floats, found {} bytes", body.len())));
    }
    let m: Manifest = serde_json::from_str(manifest).map_err(|e| malformed(format!("embedding manifest: {e}")))?;
    if m.ids.len() != count {
        return Err(malformed(format!("{} ids for {count} vectors", m.ids.len())));
    }
    let vectors: Vec<Vec<f64>> = body
        .chunks_exact(4 * dim.max(1))
        .take(count)
        .map(|row| row.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64).collect())
        .collect();
    EmbeddingSet::new(m.ids, vectors, m.modality).map_err(|e| malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let set = EmbeddingSet::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.5, -1.0, 2.0], vec![0.25, 0.0, -0.125]],
            "cad".into(),
        )
        .unwrap();
        let (bin, json) = write_embeddings(&set);
        assert_eq!(&bin[..4], b"EMB1");
        assert_eq!(bin.len(), 12 + 2 * 3 * 4);
        assert_eq!(read_embeddings(&bin, &json).unwrap(), set);
        assert!(read_embeddings(&bin[..bin.len() - 1], &json).is_err());
        assert!(read_embeddings(&bin, r#"{"modality":"cad","ids":["a"]}"#).is_err());
    }
}
