use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::DiscreteMeasure;
use crate::error::{domain, invalid, Result};
use crate::qmc::{shift, shifted_point, MAX_DIM};
use crate::specfun::{gamma_fn, normal_inv_cdf};
use crate::stats::mean_se;

const SHIFTS: usize = 8;
const SEED: u64 = 0x5eed_e4e7;

/// E|y - w|^{-alpha} for y, w independent and uniform in the unit cube
/// [0, 1]^nu, with a standard error over randomizations.
///
/// In polar coordinates around y - w the radial integral of the tent
/// density is a polynomial, so only a bounded integral over the unit
/// sphere is left: C = alpha_nu E_w[ sum_k (-1)^k e_k(w) R^{nu-alpha+k} /
/// (nu-alpha+k) ], where w is uniform on the sphere with |w| taken
/// componentwise, e_k is the k-th elementary symmetric polynomial and
/// R = 1 / max_i w_i.
pub fn cube_self_energy(nu: u32, alpha: f64, points: usize) -> Result<(f64, f64)> {
    let nf = nu as f64;
    if !(alpha > 0.0 && alpha < nf) {
        return Err(domain("the self energy of a cube needs 0 < alpha < nu"));
    }
    if nu as usize > MAX_DIM || points == 0 {
        return Err(invalid("unsupported dimension or empty point set"));
    }
    let area = 2.0 * libm::pow(core::f64::consts::PI, 0.5 * nf) / gamma_fn(0.5 * nf)?;
    let n = nu as usize;
    let per = points.div_ceil(SHIFTS);
    let mut u = vec![0.0; n];
    let mut sh = vec![0.0; n];
    let mut e = vec![0.0; n + 1];
    let mut est = Vec::with_capacity(SHIFTS);
    for k in 0..SHIFTS {
        shift(SEED ^ nu as u64, k as u64, &mut sh);
        let mut acc = 0.0;
        for p in 0..per {
            shifted_point(p as u64, &sh, &mut u);
            let mut norm = 0.0;
            for x in u.iter_mut() {
                *x = normal_inv_cdf(x.clamp(1e-300, 1.0 - 1e-16))?.abs();
                norm += *x * *x;
            }
            let norm = libm::sqrt(norm);
            let mut max = 0.0f64;
            e.iter_mut().for_each(|v| *v = 0.0);
            e[0] = 1.0;
            for &x in u.iter() {
                let w = x / norm;
                max = max.max(w);
                for j in (1..=n).rev() {
                    e[j] += e[j - 1] * w;
                }
            }
            let r = 1.0 / max;
            let mut g = 0.0;
            for (kk, ek) in e.iter().enumerate() {
                let pw = nf - alpha + kk as f64;
                let term = ek * libm::pow(r, pw) / pw;
                g += if kk % 2 == 0 { term } else { -term };
            }
            acc += g;
        }
        est.push(area * acc / per as f64);
    }
    Ok(mean_se(&est))
}

/// E|o + y - w|^{-alpha} for y, w uniform in the unit cube and offset o.
fn pair_integral(offset: &[f64], alpha: f64, points: usize) -> (f64, f64) {
    let n = offset.len();
    let per = points.div_ceil(SHIFTS).max(1);
    let mut x = vec![0.0; 2 * n];
    let mut sh = vec![0.0; 2 * n];
    let mut est = Vec::with_capacity(SHIFTS);
    for k in 0..SHIFTS {
        shift(SEED, k as u64, &mut sh);
        let mut acc = 0.0;
        for p in 0..per {
            shifted_point(p as u64, &sh, &mut x);
            let d2: f64 = (0..n).map(|i| {
                let d = offset[i] + x[i] - x[n + i];
                d * d
            }).sum();
            acc += libm::pow(d2, -0.5 * alpha);
        }
        est.push(acc / per as f64);
    }
    mean_se(&est)
}

/// alpha-energy of a measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub value: f64,
    pub se: f64,
    /// Point masses carry infinite self energy; `value` then holds the
    /// finite off-diagonal part.
    pub infinite: bool,
}

/// Evaluates alpha-energies with the cube self-energy constant and the
/// near-pair integrals cached across measures.
#[derive(Debug, Clone)]
pub struct EnergyEvaluator {
    pub nu: u32,
    pub alpha: f64,
    pub pair_samples: usize,
    diag: (f64, f64),
    near: BTreeMap<Vec<i64>, (f64, f64)>,
}

impl EnergyEvaluator {
    pub fn new(nu: u32, alpha: f64, pair_samples: usize) -> Result<Self> {
        let diag = cube_self_energy(nu, alpha, pair_samples.max(1 << 16))?;
        Ok(Self::with_diagonal(nu, alpha, pair_samples, diag))
    }

    /// Reuses a previously computed cube self-energy constant.
    pub fn with_diagonal(nu: u32, alpha: f64, pair_samples: usize, diag: (f64, f64)) -> Self {
        Self { nu, alpha, pair_samples: pair_samples.max(SHIFTS), diag, near: BTreeMap::new() }
    }

    pub fn diagonal_constant(&self) -> (f64, f64) {
        self.diag
    }

    /// Sum over cell pairs of w_j w_k times the mean of |y - w|^{-alpha}
    /// over the two cells: self pairs from the cube constant, pairs closer
    /// than four cell sides by randomized QMC, the rest at the midpoint.
    pub fn energy(&mut self, m: &DiscreteMeasure) -> Result<EnergyEstimate> {
        if m.nu != self.nu {
            return Err(invalid("measure dimension differs from the evaluator"));
        }
        let n = m.nu as usize;
        let a = m.cell_side;
        let point = m.is_point_masses();
        let scale = libm::pow(a, -self.alpha);
        let mut rows = Vec::with_capacity(m.len());
        let mut se = 0.0;
        let mut off = vec![0.0; n];
        for j in 0..m.len() {
            let wj = m.weights[j];
            let cj = m.center(j);
            let mut row = Vec::with_capacity(m.len());
            for k in 0..m.len() {
                let wk = m.weights[k];
                if j == k {
                    if !point {
                        row.push(wj * wj * self.diag.0 * scale);
                        se += wj * wj * self.diag.1 * scale;
                    }
                    continue;
                }
                let ck = m.center(k);
                let mut d2 = 0.0;
                for i in 0..n {
                    off[i] = cj[i] - ck[i];
                    d2 += off[i] * off[i];
                }
                let d = libm::sqrt(d2);
                if point || d > 4.0 * a {
                    row.push(wj * wk * libm::pow(d, -self.alpha));
                    continue;
                }
                let mut key: Vec<i64> = off.iter().map(|o| libm::round(libm::fabs(o / a) * 1e6) as i64).collect();
                key.sort_unstable();
                let (v, s) = match self.near.get(&key) {
                    Some(&v) => v,
                    None => {
                        let unit: Vec<f64> = key.iter().map(|&q| q as f64 * 1e-6).collect();
                        let v = pair_integral(&unit, self.alpha, self.pair_samples);
                        self.near.insert(key, v);
                        v
                    }
                };
                row.push(wj * wk * v * scale);
                se += wj * wk * s * scale;
            }
            rows.push(crate::stats::pairwise_sum(&row));
        }
        Ok(EnergyEstimate { value: crate::stats::pairwise_sum(&rows), se, infinite: point && !m.is_empty() })
    }
}
