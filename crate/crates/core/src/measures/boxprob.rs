use alloc::vec;

use crate::error::{invalid, Result};
use crate::qmc::{shift, shifted_point, MAX_DIM};
use crate::sampler::{CholeskyFactor, SymMatrix};
use crate::specfun::{normal_cdf, normal_inv_cdf};
use crate::stats::mean_se;

/// P(lower <= X <= upper) for X ~ N(0, cov), by Genz's separation of
/// variables with randomized Halton points. Returns (estimate, standard
/// error over `shifts` randomizations).
pub fn box_probability(cov: &SymMatrix, lower: &[f64], upper: &[f64], points: usize, shifts: usize, seed: u64) -> Result<(f64, f64)> {
    let m = cov.dim();
    if lower.len() != m || upper.len() != m || m == 0 || m > MAX_DIM + 1 {
        return Err(invalid("box bounds do not match the covariance"));
    }
    if points == 0 || shifts < 2 {
        return Err(invalid("need points > 0 and at least two shifts"));
    }
    let f = CholeskyFactor::new(cov)?;
    let mut y = vec![0.0; m];
    let mut w = vec![0.0; m.saturating_sub(1).max(1)];
    let mut sh = vec![0.0; w.len()];
    let mut est = vec![0.0; shifts];
    for (k, e) in est.iter_mut().enumerate() {
        shift(seed, k as u64, &mut sh);
        let mut acc = 0.0;
        for p in 0..points {
            shifted_point(p as u64, &sh, &mut w);
            let mut prod = 1.0;
            for i in 0..m {
                let s: f64 = (0..i).map(|j| f.entry(i, j) * y[j]).sum();
                let lii = f.entry(i, i);
                let d = normal_cdf((lower[i] - s) / lii);
                let e = normal_cdf((upper[i] - s) / lii);
                prod *= e - d;
                if prod <= 0.0 {
                    break;
                }
                if i + 1 < m {
                    let u = (d + w[i] * (e - d)).clamp(1e-300, 1.0 - 1e-16);
                    y[i] = normal_inv_cdf(u)?;
                }
            }
            acc += prod.max(0.0);
        }
        *e = acc / points as f64;
    }
    Ok(mean_se(&est))
}
