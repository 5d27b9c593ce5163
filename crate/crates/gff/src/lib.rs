//! Command-line driver, configuration and file formats for the `gff-core`
//! experiments.

pub mod cache;
pub mod cli;
pub mod config;
pub mod container;
pub mod drivers;
pub mod error;
pub mod output;
pub mod verify;

pub use error::{GffError, Result};
