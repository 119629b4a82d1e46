pub mod error;
pub mod filters;
pub mod runner;
pub mod singularity;
pub mod diagnostics;
pub mod dynamics;
pub mod spectral;

pub use error::{Error, Result};
