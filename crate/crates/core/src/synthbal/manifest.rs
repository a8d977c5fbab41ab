use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cadlang::{parse_program, program_to_json, CadProgram};

use super::SynthError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> Result<Split, String> {
        match s {
            "train" => Ok(Split::Train),
            "val" | "validation" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split {s}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Real,
    Synthetic,
}

/// One manifest line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub len: usize,
    pub split: Split,
    pub prov: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

/// Dataset entries plus an index of entry positions per `(split, len)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatasetManifest {
    entries: Vec<ManifestEntry>,
    index: BTreeMap<(Split, usize), Vec<usize>>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<DatasetManifest, SynthError> {
        let mut split_of: HashMap<&str, Split> = HashMap::with_capacity(entries.len());
        for e in &entries {
            if let Some(prev) = split_of.insert(&e.id, e.split) {
                return Err(if prev == e.split {
                    SynthError::DuplicateId(e.id.clone())
                } else {
                    SynthError::Leakage(format!("{} appears in {prev} and {}", e.id, e.split))
                });
            }
        }
        let index = Self::build_index(&entries);
        Ok(DatasetManifest { entries, index })
    }

    fn build_index(entries: &[ManifestEntry]) -> BTreeMap<(Split, usize), Vec<usize>> {
        let mut index: BTreeMap<(Split, usize), Vec<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            index.entry((e.split, e.len)).or_default().push(i);
        }
        index
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index(&self) -> &BTreeMap<(Split, usize), Vec<usize>> {
        &self.index
    }

    /// Entries of one `(split, len)` bin, in manifest order.
    pub fn bin(&self, split: Split, len: usize) -> impl Iterator<Item = &ManifestEntry> {
        self.index.get(&(split, len)).into_iter().flatten().map(|&i| &self.entries[i])
    }

    /// Sequence lengths present in `split`, ascending.
    pub fn lengths(&self, split: Split) -> Vec<usize> {
        self.index.keys().filter(|(s, _)| *s == split).map(|&(_, l)| l).collect()
    }

    pub fn split_size(&self, split: Split) -> usize {
        self.entries.iter().filter(|e| e.split == split).count()
    }

    /// Rebuilds the index from the entries and compares.
    pub fn index_is_consistent(&self) -> bool {
        Self::build_index(&self.entries) == self.index
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("entry serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<DatasetManifest, SynthError> {
        let entries = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(n, l)| serde_json::from_str(l).map_err(|e| SynthError::Manifest(format!("line {}: {e}", n + 1))))
            .collect::<Result<Vec<ManifestEntry>, _>>()?;
        DatasetManifest::new(entries)
    }
}

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const PROGRAM_DIR: &str = "programs";

/// A manifest with the programs it lists.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub programs: HashMap<String, CadProgram>,
}

impl Dataset {
    /// Builds a real-data dataset; ids come from each program's `source_id`.
    pub fn from_programs(items: Vec<(CadProgram, Split)>) -> Result<Dataset, SynthError> {
        let mut entries = Vec::with_capacity(items.len());
        let mut programs = HashMap::with_capacity(items.len());
        for (i, (p, split)) in items.into_iter().enumerate() {
            let id = p.source_id.clone().unwrap_or_else(|| format!("prog-{i:06}"));
            entries.push(ManifestEntry { id: id.clone(), len: p.len(), split, prov: Provenance::Real, trace: None });
            programs.insert(id.clone(), p.with_id(id));
        }
        Ok(Dataset { manifest: DatasetManifest::new(entries)?, programs })
    }

    pub fn program(&self, id: &str) -> Option<&CadProgram> {
        self.programs.get(id)
    }

    /// Reads `DIR/manifest.jsonl` and `DIR/programs/<id>.json`.
    pub fn load(dir: &Path) -> Result<Dataset, SynthError> {
        let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))?;
        let manifest = DatasetManifest::from_jsonl(&text)?;
        let mut programs = HashMap::with_capacity(manifest.len());
        for e in manifest.entries() {
            let bytes = std::fs::read(dir.join(PROGRAM_DIR).join(format!("{}.json", e.id)))?;
            let p = parse_program(&bytes).map_err(|err| SynthError::Manifest(format!("{}: {err}", e.id)))?;
            programs.insert(e.id.clone(), p.with_id(e.id.clone()));
        }
        Ok(Dataset { manifest, programs })
    }

    pub fn save(&self, dir: &Path) -> Result<(), SynthError> {
        let pdir = dir.join(PROGRAM_DIR);
        std::fs::create_dir_all(&pdir)?;
        std::fs::write(dir.join(MANIFEST_FILE), self.manifest.to_jsonl())?;
        for e in self.manifest.entries() {
            let p = self.programs.get(&e.id).ok_or_else(|| SynthError::Manifest(format!("no program for {}", e.id)))?;
            std::fs::write(pdir.join(format!("{}.json", e.id)), program_to_json(p))?;
        }
        Ok(())
    }
}
