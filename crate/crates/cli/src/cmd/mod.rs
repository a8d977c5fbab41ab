pub mod codec;
pub mod dataset;
pub mod eval;
pub mod geometry;
pub mod losscheck;
pub mod scan;
