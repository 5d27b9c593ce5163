//! The Fourier-side covariance integrals
//!   concentric: 1/(alpha (ts)^mu) int tau J(t tau) J(s tau) / (1 + tau^2)^p
//!   general:    (2pi)^{nu/2} / (alpha^2 (tsd)^mu) int tau^{1-mu} J(t tau) J(s tau) J(d tau) / (1 + tau^2)^p
//! integrated panel by panel between zeros of the fastest factor up to a
//! cutoff T, with [T, inf) done exactly term by term from Hankel's expansion.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{check_radius, Kernel, KernelValue, Method};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{bessel_j, expint_complex};

const TINY_TERM: f64 = 1e-18;

fn is_half_integer(mu: f64) -> bool {
    let twice = 2.0 * mu;
    twice == libm::floor(twice) && libm::fmod(twice, 2.0) == 1.0
}

/// Coefficients i^k a_k(mu) / (a T)^k of the Hankel series for H^(1)_mu(a tau),
/// in powers of (T / tau). Stops at termination, at the smallest term, or
/// when terms drop below TINY_TERM.
fn hankel_coeffs(mu: f64, at: f64) -> (Vec<Complex64>, f64) {
    let four_mu2 = 4.0 * mu * mu;
    let mut out = alloc::vec![Complex64::new(1.0, 0.0)];
    let mut mag = 1.0f64;
    let mut k = 1usize;
    let mut last = 0.0;
    loop {
        let odd = (2 * k - 1) as f64;
        let next = mag * (four_mu2 - odd * odd) / (8.0 * k as f64 * at);
        if next == 0.0 {
            last = 0.0;
            break;
        }
        if next.abs() >= mag.abs() || k > 400 {
            last = next.abs();
            break;
        }
        mag = next;
        let ik = match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        out.push(ik * mag);
        if mag.abs() < TINY_TERM {
            break;
        }
        k += 1;
    }
    (out, last)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// int_T^inf tau^{-m} e^{i omega tau} dtau, divided by T^{1-m}.
fn scaled_tail(m: f64, omega: f64, t: f64) -> Result<Complex64> {
    let z = omega.abs() * t;
    if z < 1e-300 {
        return Ok(Complex64::new(1.0 / (m - 1.0), 0.0));
    }
    let e = expint_complex(m, Complex64::new(0.0, -z))?;
    Ok(if omega < 0.0 { e.conj() } else { e })
}

struct Tail {
    value: f64,
    error: f64,
}

/// Exact tail of tau^q prod_i J_mu(a_i tau) (1 + tau^2)^{-p} over [T, inf).
fn asymptotic_tail(mu: f64, p: u32, q: f64, scales: &[f64], t: f64) -> Result<Tail> {
    let n = scales.len();
    let phi = 0.5 * mu * PI + 0.25 * PI;
    let series: Vec<(Vec<Complex64>, f64)> = scales.iter().map(|&a| hankel_coeffs(mu, a * t)).collect();
    let trunc: f64 = series.iter().map(|s| s.1).sum();

    // (1 + tau^2)^{-p} = tau^{-2p} sum_j (-1)^j C(p+j-1, j) tau^{-2j}, scaled by T^{-2j}
    let mut binom = Vec::new();
    let mut c = 1.0f64;
    let mut j = 0usize;
    loop {
        let term = c * libm::pow(t, -2.0 * j as f64);
        if j > 0 {
            binom.push(Complex64::new(0.0, 0.0));
        }
        binom.push(Complex64::new(if j.is_multiple_of(2) { term } else { -term }, 0.0));
        if term.abs() < TINY_TERM || j > 200 {
            break;
        }
        c = c * (p as f64 + j as f64) / (j as f64 + 1.0);
        j += 1;
    }
    let lead: f64 = scales.iter().map(|&a| libm::sqrt(2.0 / (PI * a))).product();
    let m0 = 2.0 * p as f64 + 0.5 * n as f64 - q;
    let pow_t = libm::pow(t, 1.0 - m0);

    let mut total = 0.0;
    let mut err = 0.0;
    for pattern in 0..(1usize << (n - 1)) {
        let mut omega = scales[0];
        let mut phase_count = 1.0;
        let mut coeffs = series[0].0.clone();
        for i in 1..n {
            let conj = (pattern >> (i - 1)) & 1 == 1;
            let s: Vec<Complex64> = if conj {
                series[i].0.iter().map(|c| c.conj()).collect()
            } else {
                series[i].0.clone()
            };
            coeffs = poly_mul(&coeffs, &s);
            if conj {
                omega -= scales[i];
                phase_count -= 1.0;
            } else {
                omega += scales[i];
                phase_count += 1.0;
            }
        }
        let d = poly_mul(&coeffs, &binom);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut last = 0.0;
        for (k, dk) in d.iter().enumerate() {
            if dk.norm() == 0.0 {
                continue;
            }
            let e = scaled_tail(m0 + k as f64, omega, t)?;
            let term = dk * e;
            acc += term;
            last = term.norm();
        }
        let phase = Complex64::from_polar(1.0, -phi * phase_count);
        total += (phase * acc).re;
        err += last + trunc * acc.norm();
    }
    let scale = lead * pow_t / libm::pow(2.0, (n - 1) as f64);
    Ok(Tail { value: scale * total, error: scale * err })
}

impl Kernel {
    /// Un-renormalized covariance of plain sphere averages by oscillatory
    /// quadrature. Works for every p < nu/2.
    pub fn raw_cov_quadrature(&self, t: f64, s: f64, dist: f64) -> Result<KernelValue> {
        check_radius(t, "raw_cov_quadrature")?;
        check_radius(s, "raw_cov_quadrature")?;
        if !(dist >= 0.0) || !dist.is_finite() {
            return Err(domain("raw_cov_quadrature requires dist >= 0"));
        }
        let mu = self.mu;
        let p = self.cfg.p;
        let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
        let mut scales = alloc::vec![hi, lo];
        let (pref, q) = if dist == 0.0 {
            (1.0 / (self.alpha * libm::pow(t * s, mu)), 1.0)
        } else {
            scales.push(dist);
            let root = libm::pow(2.0 * PI, 0.5 * self.cfg.nu as f64);
            (root / (self.alpha * self.alpha * libm::pow(t * s * dist, mu)), 1.0 - mu)
        };
        scales.sort_by(|a, b| b.total_cmp(a));
        let a_max = scales[0];
        let a_min = *scales.last().unwrap();

        // cutoff: large enough that every Hankel series is accurate at a_min T
        let x_needed = if is_half_integer(mu) { 8.0 } else { 24.0 };
        let t_min = (x_needed / a_min).max(4.0);
        let mut breaks = alloc::vec![0.0];
        let mut k = 1.0;
        let budget = self.cfg.quad_max_subdiv;
        loop {
            // McMahon's approximation of the k-th zero of J_mu
            let z = (k + 0.5 * mu - 0.25) * PI / a_max;
            if z > breaks[breaks.len() - 1] {
                breaks.push(z);
            }
            if z >= t_min || breaks.len() > budget {
                break;
            }
            k += 1.0;
        }
        let cutoff = breaks[breaks.len() - 1];
        let starved = breaks.len() > budget;

        let integrand = |x: f64| -> Result<f64> {
            if x == 0.0 {
                return Ok(0.0);
            }
            let mut v = libm::pow(x, q) / libm::pow(1.0 + x * x, p as f64);
            for &a in &scales {
                v *= bessel_j(mu, a * x)?;
            }
            Ok(v)
        };
        let opts = QuadOptions {
            rel_tol: 0.25 * self.cfg.quad_rel_tol,
            abs_tol: 0.0,
            max_intervals: budget.max(breaks.len()),
        };
        let (body, body_err) = match integrate(integrand, &breaks, opts) {
            Ok(r) => (r.value, r.error),
            Err(Error::Accuracy { value, error_estimate }) => (value, error_estimate),
            Err(e) => return Err(e),
        };
        let tail = asymptotic_tail(mu, p, q, &scales, cutoff)?;
        let value = pref * (body + tail.value);
        let est_error = pref * (body_err + tail.error);
        if starved || !(est_error <= self.cfg.quad_rel_tol * value.abs()) {
            return Err(Error::Accuracy { value, error_estimate: est_error });
        }
        Ok(KernelValue { value, method: Method::Quadrature, est_error })
    }
}
