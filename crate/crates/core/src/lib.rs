//! Measurement reliability of a spin-filter plus Stern-Gerlach detector.

pub mod cli;
pub mod error;
pub mod fit;
pub mod histories;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod reliability;
pub mod scattering;
pub mod stern_gerlach;

pub use error::{Error, Result};
pub use model::ModelParams;
