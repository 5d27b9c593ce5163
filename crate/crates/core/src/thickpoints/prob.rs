use alloc::vec::Vec;

use super::{RadiusTable, ThickConfig};
use crate::error::{invalid, Result};
use crate::specfun::ln_normal_interval;

/// Probability of one pinning event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbTerm {
    /// Standardized centre sqrt(2 nu gamma) dD_n / sqrt(dG_n).
    pub b: f64,
    pub ln_p: f64,
}

impl ProbTerm {
    pub fn p(&self) -> f64 {
        libm::exp(self.ln_p)
    }
}

/// W(P_n) = Phi(b + 1) - Phi(b - 1), kept in log form.
pub fn prob_p(table: &RadiusTable, cfg: &ThickConfig, n: usize) -> Result<ProbTerm> {
    if n >= table.len() {
        return Err(invalid("level beyond the sequence"));
    }
    let b = if n == 0 || cfg.gamma == 0.0 {
        0.0
    } else {
        cfg.threshold() * libm::exp(table.ln_dd[n] - 0.5 * table.ln_dg[n])
    };
    Ok(ProbTerm { b, ln_p: ln_normal_interval(b - 1.0, b + 1.0) })
}

/// ln W(Phi_n) = sum of ln W(P_i), i = 0..=n.
pub fn prob_phi(table: &RadiusTable, cfg: &ThickConfig, n: usize) -> Result<f64> {
    (0..=n).map(|i| prob_p(table, cfg, i).map(|t| t.ln_p)).sum()
}

/// Per-level probabilities with the constants implied by the two-sided
/// bounds |ln W(P_n) - nu gamma ln r_n| <= C sqrt(-ln r_n) and
/// ln W(Phi_n) / (nu gamma ln r_n) in [1 - C/n, 1 + C/n].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbEstimates {
    pub terms: Vec<ProbTerm>,
    pub ln_phi: Vec<f64>,
    /// Index n >= 1; NaN at n = 0.
    pub c_p: Vec<f64>,
    pub c_phi: Vec<f64>,
}

pub fn prob_estimates(table: &RadiusTable, cfg: &ThickConfig) -> Result<ProbEstimates> {
    let terms = (0..table.len()).map(|n| prob_p(table, cfg, n)).collect::<Result<Vec<_>>>()?;
    let mut ln_phi = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for t in &terms {
        acc += t.ln_p;
        ln_phi.push(acc);
    }
    let ng = cfg.nu as f64 * cfg.gamma;
    let mut c_p = Vec::with_capacity(terms.len());
    let mut c_phi = Vec::with_capacity(terms.len());
    for n in 0..terms.len() {
        let lr = table.ln_r[n];
        if n == 0 {
            c_p.push(f64::NAN);
            c_phi.push(f64::NAN);
            continue;
        }
        c_p.push((terms[n].ln_p - ng * lr).abs() / libm::sqrt(-lr));
        c_phi.push(n as f64 * (ln_phi[n] / (ng * lr) - 1.0).abs());
    }
    Ok(ProbEstimates { terms, ln_phi, c_p, c_phi })
}
