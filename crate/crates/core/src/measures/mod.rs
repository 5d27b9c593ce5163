//! Random measures spread over the pinned cells of one level, their
//! moments, alpha-energies and the Frostman-style certificate.
//!
//! Weights use the ideal cell count r_n^{-nu}, so E[mass] = 1 holds exactly
//! whenever the realized grid is uncapped; on capped grids the ratio of
//! realized to ideal counts is carried alongside. Boundary cells keep their
//! full volume.

mod boxprob;
mod energy;

use alloc::vec;
use alloc::vec::Vec;

pub use boxprob::box_probability;
pub use energy::{cube_self_energy, EnergyEstimate, EnergyEvaluator};

use crate::error::{invalid, Result};
use crate::kernels::Covariance;
use crate::sampler::{covariance_entry, FieldLayout, SymMatrix, Variable};
use crate::stats::{mean_se, pairwise_sum};
use crate::thickpoints::{prob_phi, xi_set, RadiusTable, ThickConfig};

/// Weighted cells (or points, when `cell_side` is 0) of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub nu: u32,
    pub level: usize,
    pub cell_side: f64,
    pub cells: Vec<usize>,
    centers: Vec<f64>,
    pub weights: Vec<f64>,
    /// ln of each weight, exact even where the weight underflows.
    pub ln_weights: Vec<f64>,
    /// Realized over ideal cell count at this level.
    pub count_correction: f64,
}

impl DiscreteMeasure {
    pub fn new(nu: u32, level: usize, cell_side: f64, centers: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let n = nu as usize;
        if n == 0 || centers.len() != weights.len() * n {
            return Err(invalid("centers and weights do not match"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(invalid("weights must be finite and non-negative"));
        }
        if !(cell_side >= 0.0) {
            return Err(invalid("cell side must be non-negative"));
        }
        let ln_weights = weights.iter().map(|&w| libm::log(w)).collect();
        Ok(Self { nu, level, cell_side, cells: (0..weights.len()).collect(), centers, weights, ln_weights, count_correction: 1.0 })
    }

    /// Point masses at `centers`.
    pub fn points(nu: u32, centers: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::new(nu, 0, 0.0, centers, weights)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_point_masses(&self) -> bool {
        self.cell_side == 0.0
    }

    pub fn center(&self, j: usize) -> &[f64] {
        let n = self.nu as usize;
        &self.centers[j * n..(j + 1) * n]
    }
}

/// mu(S(O, 1)), the sum of the weights.
pub fn total_mass(m: &DiscreteMeasure) -> f64 {
    pairwise_sum(&m.weights)
}

/// Uniform mass 1 / (K_n W(Phi_n)) on every cell of the level-n pinning
/// set, with K_n = r_n^{-nu}.
pub fn build_measure(layout: &FieldLayout, table: &RadiusTable, values: &[f64], cfg: &ThickConfig, n: usize) -> Result<DiscreteMeasure> {
    let cells = xi_set(layout, table, values, cfg, n)?;
    let level = layout.lattice.level(n);
    let nu = layout.nu();
    let ln_w = -level.ideal_ln_count - prob_phi(table, cfg, n)?;
    let w = libm::exp(ln_w);
    let mut centers = Vec::with_capacity(cells.len() * nu as usize);
    for &j in &cells {
        centers.extend_from_slice(layout.center(n, j));
    }
    let realized = libm::log(level.count(nu) as f64);
    Ok(DiscreteMeasure {
        nu,
        level: n,
        cell_side: level.cell_side(),
        weights: vec![w; cells.len()],
        ln_weights: vec![ln_w; cells.len()],
        cells,
        centers,
        count_correction: libm::exp(realized - level.ideal_ln_count),
    })
}

pub const MIN_MOMENT_REPLICAS: usize = 100;

/// Monte-Carlo E[M^2] with its standard error from per-replica masses.
pub fn second_moment_mc(masses: &[f64]) -> Result<(f64, f64)> {
    if masses.len() < MIN_MOMENT_REPLICAS {
        return Err(invalid("the second moment needs at least 100 replicas"));
    }
    let sq: Vec<f64> = masses.iter().map(|m| m * m).collect();
    Ok(mean_se(&sq))
}

/// Exact-up-to-QMC E[M^2] for the measure restricted to a few cells of
/// level `n`: sum over cell pairs of w^2 P(both paths pinned), with the
/// joint pinning probability a Gaussian box probability over the
/// increments of both paths.
#[allow(clippy::too_many_arguments)]
pub fn second_moment_analytic<C: Covariance + ?Sized>(
    cov: &C,
    layout: &FieldLayout,
    table: &RadiusTable,
    cfg: &ThickConfig,
    n: usize,
    cells: &[usize],
    points: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if cells.is_empty() || cells.len() > 3 || n > 2 {
        return Err(invalid("the analytic second moment handles at most 3 cells and 3 radii"));
    }
    let b = layout.block(n).ok_or_else(|| invalid("level has no sites"))?;
    if b.first_radius != 0 {
        return Err(invalid("level sites do not carry the full path"));
    }
    let ln_phi = prob_phi(table, cfg, n)?;
    let w = libm::exp(-layout.lattice.level(n).ideal_ln_count - ln_phi);
    let a = cfg.threshold();
    let centre: Vec<f64> = table.ln_dd[..=n].iter().map(|&l| a * libm::exp(l)).collect();
    let half: Vec<f64> = table.ln_dg[..=n].iter().map(|&l| libm::exp(0.5 * l)).collect();
    let p = n + 1;
    let mut total = 0.0;
    let mut var = 0.0;
    for (x, &j) in cells.iter().enumerate() {
        total += w * w * libm::exp(ln_phi);
        for &k in &cells[x + 1..] {
            // covariance of the two increment vectors
            let vars: Vec<Variable> = [j, k]
                .iter()
                .flat_map(|&c| (0..p).map(move |i| Variable { level: n, cell: c, radius: i }))
                .collect();
            let m = vars.len();
            let mut raw = vec![0.0; m * m];
            for r in 0..m {
                for s in 0..=r {
                    let v = covariance_entry(cov, layout, vars[r], vars[s])?;
                    raw[r * m + s] = v;
                    raw[s * m + r] = v;
                }
            }
            let diff = |r: usize| -> Vec<(usize, f64)> {
                if r.is_multiple_of(p) { vec![(r, 1.0)] } else { vec![(r, 1.0), (r - 1, -1.0)] }
            };
            let mut inc = SymMatrix::zeros(m);
            for r in 0..m {
                for s in 0..=r {
                    let mut acc = 0.0;
                    for (u, cu) in diff(r) {
                        for (v, cv) in diff(s) {
                            acc += cu * cv * raw[u * m + v];
                        }
                    }
                    inc.set(r, s, acc);
                }
            }
            let lower: Vec<f64> = (0..m).map(|r| centre[r % p] - half[r % p]).collect();
            let upper: Vec<f64> = (0..m).map(|r| centre[r % p] + half[r % p]).collect();
            let (pjk, se) = box_probability(&inc, &lower, &upper, points, 16, seed)?;
            total += 2.0 * w * w * pjk;
            var += (2.0 * w * w * se) * (2.0 * w * w * se);
        }
    }
    Ok((total, libm::sqrt(var)))
}

/// Share of replicas whose mass lies in [1/c1, c1] with alpha-energy at
/// most c2. A positive share is evidence for dimension >= alpha, not a proof.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub replicas: usize,
    pub zero_mass: usize,
    pub passed: usize,
    pub fraction: f64,
}

pub fn certificate_pass(mass: f64, energy: &EnergyEstimate, c1: f64, c2: f64) -> bool {
    mass > 0.0 && mass >= 1.0 / c1 && mass <= c1 && !energy.infinite && energy.value <= c2
}

/// Aggregates (mass, energy) pairs; zero-mass replicas count as failures.
pub fn capacity_certificate(records: &[(f64, EnergyEstimate)], alpha: f64, c1: f64, c2: f64) -> Result<Certificate> {
    if !(c1 > 1.0) || !(c2 > 0.0) {
        return Err(invalid("certificate needs c1 > 1 and c2 > 0"));
    }
    let passed = records.iter().filter(|(m, e)| certificate_pass(*m, e, c1, c2)).count();
    let zero_mass = records.iter().filter(|(m, _)| *m == 0.0).count();
    let replicas = records.len();
    let fraction = if replicas == 0 { 0.0 } else { passed as f64 / replicas as f64 };
    Ok(Certificate { alpha, c1, c2, replicas, zero_mass, passed, fraction })
}
