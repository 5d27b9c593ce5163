//! Thick points: finite-level detectors, the exact pinning-event
//! probabilities, the covering scheme for the upper bound and box-counting
//! dimension estimates.
//!
//! The detectors are surrogates. A limsup as t -> 0 becomes a max over the
//! `window` finest radii; a limit becomes "every ratio in the window lies
//! within `tol` of the threshold".

mod detect;
mod dimension;
mod prob;

use alloc::vec::Vec;

pub use detect::{
    detect_limsup, detect_sequential, exceedance_cells, perfect_surrogate_scan, upper_bound_cells,
    xi_set, xi_sets, DetectMode, LevelCells, ThickPointReport, UpperBoundCells,
};
pub use dimension::{box_dimension, dimension_from_counts, DimensionEstimate};
pub use prob::{prob_estimates, prob_p, prob_phi, ProbEstimates, ProbTerm};

use crate::error::{domain, invalid, Result};
use crate::kernels::Kernel;
use crate::sampler::ScaleSequence;
use crate::specfun::ln_sub_exp;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThickConfig {
    pub nu: u32,
    pub gamma: f64,
    pub tol: f64,
    pub window: usize,
    /// Thickness used by the covering scheme (default 0.95 gamma).
    pub gamma_prime: f64,
    /// Growth exponent parameter of the covering bound (default 0.9 gamma).
    pub gamma_dprime: f64,
}

impl ThickConfig {
    pub fn new(nu: u32, gamma: f64) -> Result<Self> {
        let cfg = Self {
            nu,
            gamma,
            tol: 0.05,
            window: 3,
            gamma_prime: 0.95 * gamma,
            gamma_dprime: 0.9 * gamma,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        self.tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_window(mut self, window: usize) -> Result<Self> {
        self.window = window;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu < 1 {
            return Err(invalid("nu must be positive"));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(invalid("gamma must be finite and >= 0"));
        }
        if !(self.tol >= 0.0) {
            return Err(invalid("tol must be >= 0"));
        }
        if self.window == 0 {
            return Err(invalid("window must be at least 1"));
        }
        if !(0.0..=self.gamma).contains(&self.gamma_dprime) || !(self.gamma_dprime..=self.gamma).contains(&self.gamma_prime) {
            return Err(invalid("need 0 <= gamma'' <= gamma' <= gamma"));
        }
        Ok(())
    }

    /// sqrt(2 nu gamma).
    pub fn threshold(&self) -> f64 {
        threshold(self.nu, self.gamma)
    }
}

pub fn threshold(nu: u32, gamma: f64) -> f64 {
    libm::sqrt(2.0 * nu as f64 * gamma)
}

/// theta_bar / D(t) for t in (0, 1).
pub fn ratio(kernel: &Kernel, theta_bar: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain("ratio requires t in (0, 1)"));
    }
    Ok(theta_bar * libm::exp(-kernel.ln_d(t)?))
}

/// Log-scale G, D and their increments along a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusTable {
    pub ln_r: Vec<f64>,
    pub ln_g: Vec<f64>,
    pub ln_d: Vec<f64>,
    /// ln G(r_0), then ln(G(r_n) - G(r_{n-1})).
    pub ln_dg: Vec<f64>,
    /// ln D(r_0) = -inf, then ln(D(r_n) - D(r_{n-1})).
    pub ln_dd: Vec<f64>,
}

impl RadiusTable {
    pub fn new(kernel: &Kernel, seq: &ScaleSequence) -> Result<Self> {
        let ln_g = seq.radii().iter().map(|&r| kernel.ln_g(r)).collect::<Result<Vec<_>>>()?;
        let ln_d = seq.radii().iter().map(|&r| kernel.ln_d(r)).collect::<Result<Vec<_>>>()?;
        let mut ln_dg = Vec::with_capacity(ln_g.len());
        let mut ln_dd = Vec::with_capacity(ln_g.len());
        ln_dg.push(ln_g[0]);
        ln_dd.push(ln_d[0]);
        for i in 1..ln_g.len() {
            if !(ln_g[i] > ln_g[i - 1] && ln_d[i] > ln_d[i - 1]) {
                return Err(domain("G and D must increase as the radius shrinks"));
            }
            ln_dg.push(ln_sub_exp(ln_g[i], ln_g[i - 1]));
            ln_dd.push(ln_sub_exp(ln_d[i], ln_d[i - 1]));
        }
        Ok(Self { ln_r: seq.ln_radii().to_vec(), ln_g, ln_d, ln_dg, ln_dd })
    }

    pub fn len(&self) -> usize {
        self.ln_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_r.is_empty()
    }

    /// theta / D(r_i); infinite at r_0 = 1 unless theta = 0.
    pub fn ratio(&self, theta: f64, i: usize) -> f64 {
        theta * libm::exp(-self.ln_d[i])
    }
}
