//! A thread-safe memo in front of a kernel.

use std::collections::HashMap;
use std::sync::RwLock;

use gff_core::error::Result;
use gff_core::kernels::{Covariance, Kernel, KernelValue};

/// A float reduced to 12 significant digits: (mantissa, decimal exponent).
type Key = (i64, i32);

fn key(x: f64) -> Key {
    if x == 0.0 || !x.is_finite() {
        return (0, i32::MIN);
    }
    let e = x.abs().log10().floor() as i32 - 11;
    let m = (x / 10f64.powi(e)).round() as i64;
    // rounding can carry into a 13th digit
    if m.abs() >= 1_000_000_000_000 {
        ((x / 10f64.powi(e + 1)).round() as i64, e + 1)
    } else {
        (m, e)
    }
}

fn value(k: Key) -> f64 {
    if k.1 == i32::MIN {
        return 0.0;
    }
    // parsing rounds correctly, so keys of exact decimals map back exactly
    format!("{}e{}", k.0, k.1).parse().expect("valid float literal")
}

/// Arguments are rounded to 12 significant digits and the kernel is always
/// evaluated at the rounded values, so results do not depend on which thread
/// filled an entry first.
#[derive(Debug)]
pub struct CachedKernel {
    kernel: Kernel,
    cov: RwLock<HashMap<(Key, Key, Key), KernelValue>>,
    var: RwLock<HashMap<Key, f64>>,
}

impl CachedKernel {
    pub fn new(kernel: Kernel) -> Self {
        Self { kernel, cov: RwLock::default(), var: RwLock::default() }
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.cov.read().unwrap().len() + self.var.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Covariance for CachedKernel {
    fn nu(&self) -> u32 {
        self.kernel.config().nu
    }

    fn cov(&self, t: f64, s: f64, dist: f64) -> Result<KernelValue> {
        // the kernel is symmetric in (t, s)
        let (kt, ks) = if t <= s { (key(t), key(s)) } else { (key(s), key(t)) };
        let k = (kt, ks, key(dist));
        if let Some(v) = self.cov.read().unwrap().get(&k) {
            return Ok(*v);
        }
        let v = self.kernel.cov(value(kt), value(ks), value(k.2))?;
        self.cov.write().unwrap().insert(k, v);
        Ok(v)
    }

    fn variance(&self, t: f64) -> Result<f64> {
        let k = key(t);
        if let Some(v) = self.var.read().unwrap().get(&k) {
            return Ok(*v);
        }
        let v = self.kernel.variance(value(k))?;
        self.var.write().unwrap().insert(k, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_keep_twelve_digits() {
        for x in [1.0, 0.125, 3.0e-7, 123456.789, 0.999_999_999_999_9, 2f64.powi(-100)] {
            let r = value(key(x));
            assert!(((r - x) / x).abs() < 1e-11, "{x} -> {r}");
        }
        assert_eq!(key(0.1 + 0.2), key(0.3));
        assert_eq!(value(key(0.0)), 0.0);
        assert_eq!(value(key(1.0)), 1.0);
        assert_eq!(value(key(0.5)), 0.5);
    }
}
