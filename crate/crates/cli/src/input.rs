use std::path::{Path, PathBuf};

use anyhow::Result;
use cadseq::cadlang::{from_matrix, parse_program, read_records, BINARY_MAGIC};
use cadseq::io::list_files;
use cadseq::CadProgram;

use crate::run::config_error;

/// File names written by this tool that must not be read back as programs.
const SIDECARS: [&str; 2] = ["run.json", "report.json"];

pub struct Loaded {
    pub id: String,
    pub program: Result<CadProgram, String>,
}

fn stem_id(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path).with_extension("");
    rel.to_string_lossy().replace('\\', "/")
}

fn from_file(root: &Path, path: &Path, out: &mut Vec<Loaded>) {
    let id = stem_id(root, path);
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            out.push(Loaded { id, program: Err(e.to_string()) });
            return;
        }
    };
    if !bytes.starts_with(BINARY_MAGIC) {
        let program = parse_program(&bytes).map(|p| p.with_id(id.clone())).map_err(|e| e.to_string());
        out.push(Loaded { id, program });
        return;
    }
    match read_records(&bytes) {
        Ok(recs) => {
            let ids = record_ids(path, recs.len());
            for (m, rid) in recs.iter().zip(ids) {
                let program = from_matrix(m).map(|p| p.with_id(rid.clone())).map_err(|e| e.to_string());
                out.push(Loaded { id: rid, program });
            }
        }
        Err(e) => out.push(Loaded { id, program: Err(e.to_string()) }),
    }
}

/// Ids of a record file: from its `<file>.json` sidecar when present,
/// otherwise `<stem>-<index>`.
pub fn record_ids(path: &Path, n: usize) -> Vec<String> {
    let side = sidecar_path(path);
    if let Ok(text) = std::fs::read_to_string(&side) {
        if let Ok(v) = serde_json::from_str::<serde_json::Value>(&text) {
            if let Some(ids) = v.get("ids").and_then(|x| x.as_array()) {
                let ids: Vec<String> = ids.iter().filter_map(|x| x.as_str().map(str::to_owned)).collect();
                if ids.len() == n {
                    return ids;
                }
            }
        }
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    (0..n).map(|i| format!("{stem}-{i:05}")).collect()
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Programs from a JSON file, a binary record file, or a directory of either
/// (searched recursively, sorted by path).
pub fn load_programs(path: &Path) -> Result<Vec<Loaded>> {
    if !path.exists() {
        return Err(config_error(format!("input {} does not exist", path.display())));
    }
    let mut out = Vec::new();
    if path.is_file() {
        let root = path.parent().unwrap_or(Path::new(""));
        from_file(root, path, &mut out);
        return Ok(out);
    }
    for f in list_files(path, &["json", "csq", "bin"])? {
        let name = f.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if SIDECARS.contains(&name) || name.ends_with(".csq.json") || name.ends_with(".bin.json") {
            continue;
        }
        from_file(path, &f, &mut out);
    }
    Ok(out)
}

/// Writes `bytes` to `dir/<id><ext>`, creating parent directories.
pub fn write_item(dir: &Path, id: &str, ext: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(format!("{id}{ext}"));
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}
