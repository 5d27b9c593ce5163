//! Raw concentric covariance for p >= 2:
//!   1/(alpha (ts)^mu (p-1)!) (-1/(2m) d/dm)^{p-1} [K_mu(m t) I_mu(m s)] at m = 1,
//! expanded symbolically with K'_a = -(K_{a-1} + K_{a+1})/2 and
//! I'_b = (I_{b-1} + I_{b+1})/2.

use alloc::vec::Vec;

use super::Kernel;
use crate::error::{domain, Error, Result};
use crate::specfun::{bessel_i_scaled, bessel_k_scaled};

/// c * m^e * K_a(m t) * I_b(m s)
#[derive(Debug, Clone, Copy)]
struct Term {
    c: f64,
    e: i32,
    a: f64,
    b: f64,
}

fn push(terms: &mut Vec<Term>, t: Term) {
    if let Some(x) = terms.iter_mut().find(|x| x.e == t.e && x.a == t.a && x.b == t.b) {
        x.c += t.c;
    } else {
        terms.push(t);
    }
}

/// Applies -1/(2m) d/dm to the expansion.
fn step(terms: &[Term], t: f64, s: f64) -> Vec<Term> {
    let mut out = Vec::new();
    for x in terms {
        let h = -0.5 * x.c;
        if x.e != 0 {
            push(&mut out, Term { c: h * x.e as f64, e: x.e - 2, ..*x });
        }
        // d/dm K_a(mt) = t K'_a(mt); orders stay non-negative since K_{-a} = K_a
        for a in [x.a - 1.0, x.a + 1.0] {
            push(&mut out, Term { c: h * t * -0.5, e: x.e - 1, a: a.abs(), b: x.b });
        }
        for b in [x.b - 1.0, x.b + 1.0] {
            push(&mut out, Term { c: h * s * 0.5, e: x.e - 1, a: x.a, b });
        }
    }
    out.retain(|x| x.c != 0.0);
    out
}

impl Kernel {
    /// Raw (un-renormalized) concentric covariance for p >= 2.
    pub fn concentric_cov_p(&self, t: f64, s: f64) -> Result<f64> {
        let p = self.cfg.p;
        if p < 2 {
            return Err(Error::Unsupported("concentric_cov_p needs p >= 2; use concentric_closed".into()));
        }
        if !(t > 0.0 && t <= 1.0 && s > 0.0 && s <= 1.0) {
            return Err(domain("concentric_cov_p requires t, s in (0, 1]"));
        }
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        let mu = self.mu;
        let mut terms = alloc::vec![Term { c: 1.0, e: 0, a: mu, b: mu }];
        let mut fact = 1.0;
        for k in 1..p {
            terms = step(&terms, hi, lo);
            fact *= k as f64;
        }
        let mut sum = 0.0;
        for x in &terms {
            if x.b < 0.0 {
                return Err(Error::Unsupported("negative I order in derivative expansion".into()));
            }
            // K_a(hi) I_b(lo) = (e^hi K)(e^-lo I) e^{lo - hi}
            let kv = bessel_k_scaled(x.a, hi)?;
            let iv = bessel_i_scaled(x.b, lo)?;
            sum += x.c * kv * iv;
        }
        sum *= libm::exp(lo - hi);
        Ok(sum / (self.alpha * libm::pow(hi * lo, mu) * fact))
    }
}
