use std::path::{Path, PathBuf};

use crate::cadlang::{parse_program, read_records, sequence_length, BINARY_MAGIC};
use crate::synthbal::{DatasetManifest, MANIFEST_FILE};

use super::FormatError;

/// Files under `dir` (recursively) with one of `exts`, sorted by path.
pub fn list_files(dir: &Path, exts: &[&str]) -> Result<Vec<PathBuf>, FormatError> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().and_then(|e| e.to_str()).is_some_and(|e| exts.contains(&e.to_ascii_lowercase().as_str())) {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Sequence lengths of every program in a dataset directory, with the number
/// of files that could not be read. Uses `manifest.jsonl` when present,
/// otherwise every `.json` program file and every binary record file
/// (`.csq`, `.bin`) found recursively.
pub fn dataset_lengths(dir: &Path) -> Result<(Vec<usize>, usize), FormatError> {
    let manifest = dir.join(MANIFEST_FILE);
    if manifest.exists() {
        let m = DatasetManifest::from_jsonl(&std::fs::read_to_string(manifest)?)
            .map_err(|e| super::malformed(e.to_string()))?;
        return Ok((m.entries().iter().map(|e| e.len).collect(), 0));
    }
    let mut lengths = Vec::new();
    let mut failed = 0;
    for path in list_files(dir, &["json", "csq", "bin"])? {
        let bytes = std::fs::read(&path)?;
        if bytes.starts_with(BINARY_MAGIC) {
            match read_records(&bytes) {
                Ok(recs) => lengths.extend(recs.iter().map(|m| m.content_rows())),
                Err(_) => failed += 1,
            }
        } else {
            match parse_program(&bytes) {
                Ok(p) => lengths.push(sequence_length(&p)),
                Err(_) => failed += 1,
            }
        }
    }
    Ok((lengths, failed))
}
