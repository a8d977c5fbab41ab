//! Sketch-and-extrude CAD programs: a fixed-size quantized codec, a
//! membership-oracle solid kernel with boundary sampling, synthetic
//! length-balanced dataset generation, evaluation metrics, and the latent
//! alignment/diffusion loss mathematics.
//!
//! Data-parallel loops go through [`par`]; with the `parallel` feature
//! (default) they run on rayon, otherwise sequentially. Results never
//! depend on the execution mode or thread count.

pub mod cadlang;
pub mod fixture;
pub mod geom;
pub mod io;
pub mod latent;
pub mod metrics;
pub mod par;
pub mod synthbal;

pub use cadlang::{CadProgram, Command, QuantizedMatrix};
pub use geom::{PointCloud, SolidModel, ValidityReport};
pub use par::Exec;
