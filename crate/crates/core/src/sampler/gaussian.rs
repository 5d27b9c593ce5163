use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};

/// Dense symmetric matrix, row-major, both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from row-major data, checking exact symmetry.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(invalid("matrix data has the wrong length"));
        }
        let m = Self { n, data };
        if !m.is_symmetric() {
            return Err(invalid("matrix is not symmetric"));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both (i, j) and (j, i).
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j).to_bits() == self.get(j, i).to_bits()))
    }
}

pub const JITTER_LADDER: [f64; 4] = [1e-12, 1e-10, 1e-8, 1e-6];

/// Lower Cholesky factor of the correlation matrix, with the standard
/// deviations kept apart so that variances spanning many orders of
/// magnitude factor cleanly.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>,
    scale: Vec<f64>,
    /// Jitter added to the correlation diagonal (0 when none was needed).
    pub jitter: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut s = ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

const BLOCK: usize = 16;

/// In-place blocked Cholesky of `corr + jitter I`; returns the smallest
/// relative pivot on failure.
fn factor_in_place(l: &mut [f64], corr: &[f64], n: usize, jitter: f64) -> core::result::Result<(), f64> {
    let mut i0 = 0;
    while i0 < n {
        let i1 = (i0 + BLOCK).min(n);
        for j in 0..i1 {
            let (row_j, after) = l[j * n..].split_at_mut(n);
            for i in j.max(i0)..i1 {
                if i == j {
                    let s = corr[j * n + j] + jitter - dot(&row_j[..j], &row_j[..j]);
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(s);
                    }
                    row_j[j] = libm::sqrt(s);
                } else {
                    let row_i = &mut after[(i - j - 1) * n..(i - j) * n];
                    let s = corr[i * n + j] - dot(&row_i[..j], &row_j[..j]);
                    row_i[j] = s / row_j[j];
                }
            }
        }
        i0 = i1;
    }
    Ok(())
}

impl CholeskyFactor {
    /// Factors `cov`, escalating jitter through [`JITTER_LADDER`] when the
    /// plain factorization fails.
    pub fn new(cov: &SymMatrix) -> Result<Self> {
        let n = cov.dim();
        let mut scale = Vec::with_capacity(n);
        for i in 0..n {
            let v = cov.get(i, i);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NotPositiveDefinite { min_pivot: v });
            }
            scale.push(libm::sqrt(v));
        }
        let mut corr = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let c = if i == j { 1.0 } else { cov.get(i, j) / (scale[i] * scale[j]) };
                corr[i * n + j] = c;
            }
        }
        let mut l = vec![0.0; n * n];
        let mut worst = f64::INFINITY;
        for jitter in core::iter::once(0.0).chain(JITTER_LADDER) {
            match factor_in_place(&mut l, &corr, n, jitter) {
                Ok(()) => return Ok(Self { n, l, scale, jitter }),
                Err(p) => worst = if p.is_nan() { p } else { p - jitter },
            }
            l.iter_mut().for_each(|x| *x = 0.0);
        }
        Err(Error::NotPositiveDefinite { min_pivot: worst })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry (i, j) of the covariance factor diag(scale) L.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.scale[i] * self.l[i * self.n + j]
    }

    /// out = diag(scale) L z.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            *o = self.scale[i] * dot(&self.l[i * n..i * n + i + 1], &z[..=i]);
        }
    }
}

/// Replica stream: ChaCha20 keyed by `seed_from_u64(seed)` with the stream
/// id set to `replica_id`.
pub fn replica_rng(seed: u64, replica_id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(replica_id);
    rng
}

pub fn fill_standard_normal(rng: &mut ChaCha20Rng, z: &mut [f64]) {
    for x in z {
        *x = StandardNormal.sample(rng);
    }
}

/// One joint draw of every variable of a [`super::FieldLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub seed: u64,
    pub replica_id: u64,
    pub values: Vec<f64>,
}

/// Draws replicas from a factored covariance.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    factor: CholeskyFactor,
}

impl GaussianSampler {
    pub fn new(cov: &SymMatrix) -> Result<Self> {
        Ok(Self { factor: CholeskyFactor::new(cov)? })
    }

    pub fn from_factor(factor: CholeskyFactor) -> Self {
        Self { factor }
    }

    pub fn factor(&self) -> &CholeskyFactor {
        &self.factor
    }

    pub fn dim(&self) -> usize {
        self.factor.n
    }

    /// Writes replica `replica_id` into `out`, using `z` as scratch.
    pub fn sample_into(&self, seed: u64, replica_id: u64, z: &mut [f64], out: &mut [f64]) {
        let mut rng = replica_rng(seed, replica_id);
        fill_standard_normal(&mut rng, z);
        self.factor.apply(z, out);
    }

    pub fn sample(&self, seed: u64, replica_id: u64) -> FieldSample {
        let n = self.dim();
        let mut z = vec![0.0; n];
        let mut values = vec![0.0; n];
        self.sample_into(seed, replica_id, &mut z, &mut values);
        FieldSample { seed, replica_id, values }
    }
}

/// Replicas 0..n_replicas of N(0, cov).
pub fn sample_field(cov: &SymMatrix, seed: u64, n_replicas: u64) -> Result<Vec<FieldSample>> {
    let sampler = GaussianSampler::new(cov)?;
    Ok((0..n_replicas).map(|r| sampler.sample(seed, r)).collect())
}
