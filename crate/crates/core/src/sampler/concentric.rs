use alloc::vec;
use alloc::vec::Vec;

use super::gaussian::{fill_standard_normal, replica_rng};
use super::sequence::ScaleSequence;
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::specfun::ln_sub_exp;

/// ln G(r_0) followed by ln(G(r_n) - G(r_{n-1})) for n >= 1.
pub fn ln_increment_variances(kernel: &Kernel, seq: &ScaleSequence) -> Result<Vec<f64>> {
    let ln_g = seq.radii().iter().map(|&r| kernel.ln_g(r)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(ln_g.len());
    out.push(ln_g[0]);
    for w in ln_g.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Domain("G is not increasing along the sequence".into()));
        }
        out.push(ln_sub_exp(w[1], w[0]));
    }
    Ok(out)
}

/// Paths of the concentric averages at one point, built from independent
/// Gaussian increments. Path `i` uses replica stream `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentricPaths {
    levels: usize,
    values: Vec<f64>,
}

impl ConcentricPaths {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn n_paths(&self) -> usize {
        self.values.len() / self.levels
    }

    pub fn path(&self, i: usize) -> &[f64] {
        &self.values[i * self.levels..(i + 1) * self.levels]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.levels)
    }
}

pub fn sample_concentric(
    kernel: &Kernel,
    seq: &ScaleSequence,
    n_paths: usize,
    seed: u64,
) -> Result<ConcentricPaths> {
    let sd: Vec<f64> = ln_increment_variances(kernel, seq)?
        .into_iter()
        .map(|l| libm::exp(0.5 * l))
        .collect();
    let levels = sd.len();
    let mut values = vec![0.0; n_paths * levels];
    for (i, path) in values.chunks_exact_mut(levels).enumerate() {
        let mut rng = replica_rng(seed, i as u64);
        fill_standard_normal(&mut rng, path);
        let mut acc = 0.0;
        for (x, s) in path.iter_mut().zip(&sd) {
            acc += *x * s;
            *x = acc;
        }
    }
    Ok(ConcentricPaths { levels, values })
}
