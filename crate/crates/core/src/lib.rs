pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod measurement;
pub mod states;
pub mod stats;
pub mod tomography;
pub mod witness;

pub use error::{Error, Result};
