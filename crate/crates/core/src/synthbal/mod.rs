//! Length-balanced dataset construction: synthetic augmentation of
//! under-represented sequence lengths and reduction of over-represented ones.

mod augment;
mod generate;
mod manifest;
mod policy;
mod stats;

use thiserror::Error;

pub use augment::{arc_augment, has_arc, noise_augment, re_extrude, replace_extrude, replace_sketch, rre};
pub use generate::{
    check_no_leakage, generate_synthbal, largest_remainder, length_quotas, reduction_balance, trace_sources,
    BinReport, GenerationReport, ReductionReport, Shortfall, SynthBalConfig, PARTNER_DRAWS, RETRY_BUDGET,
};
pub use manifest::{Dataset, DatasetManifest, ManifestEntry, Provenance, Split, MANIFEST_FILE, PROGRAM_DIR};
pub use stats::{length_histogram, share_at_most, share_of, HistogramRow};
pub use policy::{chain_label, AugmentOp, AugmentationPolicy, PolicyKind, LARGE_NOISE, SMALL_NOISE};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("no sketch of equal size at a shared index")]
    NoCompatibleSketch,
    #[error("no (sketch, extrude) group of equal size at a shared index")]
    NoCompatibleGroup,
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("split leakage: {0}")]
    Leakage(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("program {0} missing from store")]
    MissingProgram(String),
    #[error("real-data ratio {0} outside [0, 1]")]
    BadRatio(f64),
    #[error("target {target} smaller than the {lengths} lengths present")]
    TargetTooSmall { target: usize, lengths: usize },
    #[error("target {target} exceeds the {available} real entries")]
    TargetTooLarge { target: usize, available: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
