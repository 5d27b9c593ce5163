//! Numerical core for circle-average Gaussian free fields: covariance kernels,
//! multi-scale lattice sampling, thick-point detection and Frostman measures.
//!
//! Everything here is `no_std` with `alloc`; IO and parallel drivers live in
//! the `gff` crate.
#![no_std]

extern crate alloc;

pub mod error;
pub mod specfun;

pub use error::{Error, Result};
pub mod kernels;
pub mod measures;
pub mod qmc;
pub mod quad;
pub mod sampler;
pub mod stats;
pub mod thickpoints;
