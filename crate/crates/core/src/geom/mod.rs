//! Compilation of programs into membership-oracle solids, validity checks
//! and boundary sampling.

pub mod intersect;
pub mod profile;
mod sample;
pub mod solid;
mod validity;

use thiserror::Error;

use crate::cadlang::CadError;

pub use intersect::check_self_intersection;
pub use profile::Profile;
pub use sample::{monte_carlo_volume, monte_carlo_volume_with, sample_surface, VolumeEstimate, OVERSAMPLING_BUDGET};
pub use solid::{compile, Aabb, ExtrudedSolid, Frame, SolidModel, P3};
pub use validity::{is_valid, quick_valid, ValidityReport, VALIDITY_SAMPLES, VALIDITY_SEED};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error(transparent)]
    Grammar(CadError),
    #[error("degenerate loop at command {index}: {reason}")]
    DegenerateLoop { index: usize, reason: String },
    #[error("loop ending at command {index} does not close")]
    OpenLoop { index: usize },
    #[error("extrude at command {index} has zero thickness")]
    ZeroThickness { index: usize },
    #[error("extrude at command {index} has zero scale")]
    ZeroScale { index: usize },
    #[error("extrude at command {index} has no orthonormal sketch plane")]
    BadPlane { index: usize },
}

impl CompileError {
    /// Index of the offending command.
    pub fn index(&self) -> Option<usize> {
        match self {
            CompileError::Grammar(CadError::Grammar { index, .. }) => Some(*index),
            CompileError::Grammar(_) => None,
            CompileError::DegenerateLoop { index, .. }
            | CompileError::OpenLoop { index }
            | CompileError::ZeroThickness { index }
            | CompileError::ZeroScale { index }
            | CompileError::BadPlane { index } => Some(*index),
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("found {found} of {requested} boundary points within the retry budget")]
pub struct SamplingError {
    pub requested: usize,
    pub found: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<P3>,
    pub normals: Option<Vec<P3>>,
    pub seed: Option<u64>,
    pub source_id: Option<String>,
}

impl PointCloud {
    pub fn from_points(points: Vec<P3>) -> PointCloud {
        PointCloud { points, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn with_source(mut self, id: impl Into<String>) -> PointCloud {
        self.source_id = Some(id.into());
        self
    }

    pub fn centroid(&self) -> P3 {
        let n = self.points.len().max(1) as f64;
        let mut c = [0.0; 3];
        for p in &self.points {
            for k in 0..3 {
                c[k] += p[k];
            }
        }
        c.map(|v| v / n)
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(&self.points)
    }

    /// Applies `p -> (p - center) * factor` to points; normals are unchanged.
    pub fn recentered(&self, center: P3, factor: f64) -> PointCloud {
        let points = self
            .points
            .iter()
            .map(|p| [(p[0] - center[0]) * factor, (p[1] - center[1]) * factor, (p[2] - center[2]) * factor])
            .collect();
        PointCloud { points, ..self.clone() }
    }
}
