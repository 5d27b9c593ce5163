use core::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::digamma_int;
use crate::error::{domain, Error, Result};

/// Generalized exponential integral E_m(z) = int_1^inf e^{-zt} t^{-m} dt for
/// real m > 0 and complex z with Re z >= 0, z != 0.
pub fn expint_complex(m: f64, z: Complex64) -> Result<Complex64> {
    if !(m > 0.0) || !m.is_finite() || z.re < 0.0 || z.norm() == 0.0 {
        return Err(domain("expint_complex requires m > 0 and Re z >= 0, z != 0"));
    }
    if z.norm() < 1.5 {
        Ok(series(m, z))
    } else {
        continued_fraction(m, z)
    }
}

fn series(m: f64, z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0); // (-z)^k / k!
    let n = libm::round(m);
    let integer = n == m;
    for k in 0..200usize {
        let kf = k as f64;
        if kf > 0.0 {
            pow = pow * (-z) / kf;
        }
        let denom = kf + 1.0 - m;
        if integer && denom == 0.0 {
            continue;
        }
        let t = pow / denom;
        sum += t;
        if kf > m && t.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    let lead = if integer {
        let n = n as u32;
        let mut c = Complex64::new(1.0, 0.0);
        for k in 1..n {
            c = c * (-z) / k as f64;
        }
        c * (Complex64::new(digamma_int(n), 0.0) - z.ln())
    } else {
        // Gamma(1 - m) by reflection, carried in logs for large m
        let ln_mag = libm::log(PI) - libm::lgamma_r(m).0;
        let g = libm::exp(ln_mag) / libm::sin(PI * m);
        (z.ln() * (m - 1.0)).exp() * g
    };
    lead - sum
}

fn continued_fraction(m: f64, z: Complex64) -> Result<Complex64> {
    const TINY: f64 = 1e-300;
    let one = Complex64::new(1.0, 0.0);
    let mut b = z + m;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 1..20_000usize {
        let an = -(i as f64) * (m - 1.0 + i as f64);
        b += 2.0;
        d = one / (d * an + b);
        c = b + c.inv() * an;
        let del = c * d;
        h *= del;
        if (del - one).norm() < 1e-16 {
            return Ok(h * (-z).exp());
        }
    }
    Err(Error::Accuracy { value: h.re, error_estimate: f64::INFINITY })
}
