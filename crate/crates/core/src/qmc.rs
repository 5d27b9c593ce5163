//! Halton points with Cranley-Patterson shifts.

use rand_chacha::rand_core::RngCore;

use crate::sampler::replica_rng;

const PRIMES: [u32; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107,
    109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

pub const MAX_DIM: usize = PRIMES.len();

/// Radical inverse of `index` in the base of coordinate `dim`.
pub fn halton(mut index: u64, dim: usize) -> f64 {
    let b = PRIMES[dim] as u64;
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut x = 0.0;
    while index > 0 {
        x += (index % b) as f64 * f;
        index /= b;
        f *= inv;
    }
    x
}

/// Fills `out` with point `index` of the Halton sequence (index 0 skipped),
/// shifted modulo 1 by `shift`.
pub fn shifted_point(index: u64, shift: &[f64], out: &mut [f64]) {
    for (d, (o, s)) in out.iter_mut().zip(shift).enumerate() {
        let x = halton(index + 1, d) + s;
        *o = if x >= 1.0 { x - 1.0 } else { x };
    }
}

/// Uniform shift vector for randomization `k`, reproducible from `seed`.
pub fn shift(seed: u64, k: u64, out: &mut [f64]) {
    let mut rng = replica_rng(seed, k);
    for o in out {
        *o = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    }
}
