//! Overlapping balls. Averaging over the sphere of radius `lo` first, the
//! renormalized average over the sphere of radius `hi` seen from a point at
//! distance rho is C_incl(hi, rho) inside the ball and C_disj(rho) outside,
//! which leaves a smooth one-dimensional integral over the polar angle with
//! a single kink at rho = hi.

use core::f64::consts::PI;

use super::{Kernel, KernelValue, Method};
use crate::error::Result;
use crate::quad::{integrate, QuadOptions};
use crate::specfun::gamma_fn;

impl Kernel {
    pub(crate) fn overlap_sphere_average(&self, hi: f64, lo: f64, d: f64) -> Result<KernelValue> {
        let nu = self.cfg.nu as f64;
        let norm = gamma_fn(0.5 * nu)? / (libm::sqrt(PI) * gamma_fn(0.5 * (nu - 1.0))?);
        let cos_kink = ((d * d + lo * lo - hi * hi) / (2.0 * d * lo)).clamp(-1.0, 1.0);
        let kink = libm::acos(cos_kink);
        let k_ratio = self.k_over_i(hi)?;
        let f = |phi: f64| -> Result<f64> {
            let rho2 = (d * d + lo * lo - 2.0 * d * lo * libm::cos(phi)).max(0.0);
            let rho = libm::sqrt(rho2);
            let v = if phi < kink {
                self.inv_root * self.i_over_pow(rho)? * k_ratio
            } else {
                self.inv_root * self.k_over_pow(rho)?
            };
            Ok(v * libm::pow(libm::sin(phi), nu - 2.0))
        };
        let opts = QuadOptions { rel_tol: 1e-13, abs_tol: 0.0, max_intervals: self.cfg.quad_max_subdiv };
        let mut breaks = alloc::vec::Vec::with_capacity(9);
        for k in 0..=4 {
            breaks.push(kink * k as f64 / 4.0);
        }
        let inner = integrate(f, &breaks, opts)?;
        breaks.clear();
        for k in 0..=4 {
            breaks.push(kink + (PI - kink) * k as f64 / 4.0);
        }
        let outer = integrate(f, &breaks, opts)?;
        let c = self.renorm_factor(lo)? * norm;
        Ok(KernelValue {
            value: c * (inner.value + outer.value),
            method: Method::SphereAverage,
            est_error: c * (inner.error + outer.error),
        })
    }
}
