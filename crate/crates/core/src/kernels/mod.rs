//! Covariance kernels of the renormalized spherical-average field and the
//! scalar functions derived from them.
//!
//! All `cov_*` functions return covariances of the renormalized field
//! except [`Kernel::raw_cov_quadrature`], [`Kernel::concentric_closed`] and
//! [`Kernel::concentric_cov_p`], which work with plain sphere averages.
//!
//! The general Fourier integral carries the prefactor (2pi)^{nu/2}/alpha^2
//! (with the distance factor J_mu(d tau)/(d tau)^mu), while the concentric
//! form carries 1/alpha. The two agree: J_mu(z)/z^mu tends to
//! 1/(2^mu Gamma(mu + 1)) and (2pi)^{nu/2} = alpha 2^mu Gamma(mu + 1), so the
//! general integral reduces to the concentric one as the distance goes to 0.
//! `tests/kernels.rs` checks this limit numerically.

mod higher;
mod oscillatory;
mod sphere;

use core::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{bessel_i_scaled, bessel_j, bessel_k_scaled, gamma_fn, ik_scaled, ln_bessel_i, ln_bessel_k};

/// How the tail of the oscillatory integral is handled. Only one policy
/// exists: panels between zeros of the fastest factor up to a cutoff, then
/// the remaining tail integrated term by term from Hankel's expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailPolicy {
    #[default]
    ZeroPartitioned,
}

/// Evaluation route for overlapping (neither disjoint nor nested) balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapMethod {
    /// Average the closed two-region kernel over the smaller sphere.
    #[default]
    SphereAverage,
    /// The triple-Bessel Fourier integral.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub nu: u32,
    pub p: u32,
    pub quad_rel_tol: f64,
    pub quad_max_subdiv: usize,
    pub tail_policy: TailPolicy,
    pub overlap: OverlapMethod,
}

impl KernelConfig {
    pub fn new(nu: u32, p: u32) -> Result<Self> {
        let cfg = Self {
            nu,
            p,
            quad_rel_tol: 1e-8,
            quad_max_subdiv: 10_000,
            tail_policy: TailPolicy::default(),
            overlap: OverlapMethod::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_quad_rel_tol(mut self, tol: f64) -> Result<Self> {
        self.quad_rel_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu < 3 {
            return Err(domain(alloc::format!("nu must be >= 3, got {}", self.nu)));
        }
        if self.p < 1 || 2 * self.p >= self.nu {
            return Err(domain(alloc::format!(
                "p must satisfy 1 <= p < nu/2, got p={} nu={}",
                self.p, self.nu
            )));
        }
        if !(self.quad_rel_tol > 0.0 && self.quad_rel_tol <= 1e-4) {
            return Err(domain("quad_rel_tol must lie in (0, 1e-4]"));
        }
        if self.quad_max_subdiv == 0 {
            return Err(domain("quad_max_subdiv must be positive"));
        }
        Ok(())
    }

    /// Bessel order (nu - 2)/2.
    pub fn mu(&self) -> f64 {
        0.5 * (self.nu as f64 - 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedDisjoint,
    ClosedInclusion,
    ClosedConcentric,
    Quadrature,
    SphereAverage,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedDisjoint => "closed_disjoint",
            Method::ClosedInclusion => "closed_inclusion",
            Method::ClosedConcentric => "closed_concentric",
            Method::Quadrature => "quadrature",
            Method::SphereAverage => "sphere_average",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub method: Method,
    pub est_error: f64,
}

impl KernelValue {
    fn closed(value: f64, method: Method) -> Self {
        Self { value, method, est_error: 0.0 }
    }
}

/// Surface area of the unit sphere in R^nu.
pub fn alpha_nu(nu: u32) -> Result<f64> {
    if nu < 2 {
        return Err(domain("alpha_nu requires nu >= 2"));
    }
    let h = 0.5 * nu as f64;
    Ok(2.0 * libm::pow(PI, h) / gamma_fn(h)?)
}

/// Anything that yields renormalized covariances. Lets callers put a cache
/// in front of [`Kernel`].
pub trait Covariance {
    fn nu(&self) -> u32;
    fn cov(&self, t: f64, s: f64, dist: f64) -> Result<KernelValue>;
    fn variance(&self, t: f64) -> Result<f64>;
}

/// Immutable kernel evaluator for one (nu, p).
#[derive(Debug, Clone)]
pub struct Kernel {
    cfg: KernelConfig,
    mu: f64,
    alpha: f64,
    /// alpha / (2 pi)^nu
    kappa: f64,
    /// (2 pi)^{-nu/2}
    inv_root: f64,
    gamma_half_nu: f64,
}

fn check_radius(t: f64, name: &str) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(domain(alloc::format!("{name}: radius must lie in (0, 1], got {t}")));
    }
    Ok(())
}

impl Kernel {
    pub fn new(cfg: KernelConfig) -> Result<Self> {
        cfg.validate()?;
        let nu = cfg.nu as f64;
        let alpha = alpha_nu(cfg.nu)?;
        Ok(Self {
            cfg,
            mu: cfg.mu(),
            alpha,
            kappa: alpha / libm::pow(2.0 * PI, nu),
            inv_root: libm::pow(2.0 * PI, -0.5 * nu),
            gamma_half_nu: gamma_fn(0.5 * nu)?,
        })
    }

    pub fn config(&self) -> &KernelConfig {
        &self.cfg
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn require_p1(&self, what: &str) -> Result<()> {
        if self.cfg.p != 1 {
            return Err(Error::Unsupported(alloc::format!("{what} is only available for p = 1")));
        }
        Ok(())
    }

    /// I_mu(z) / z^mu with the z -> 0 limit built in.
    pub(crate) fn i_over_pow(&self, z: f64) -> Result<f64> {
        let mu = self.mu;
        if z < 2.0 {
            let y = 0.25 * z * z;
            let mut term = 1.0 / self.gamma_half_nu;
            let mut sum = term;
            let mut k = 1.0;
            while k < 200.0 {
                term *= y / (k * (mu + k));
                sum += term;
                if term < 1e-17 * sum {
                    break;
                }
                k += 1.0;
            }
            return Ok(sum * libm::pow(2.0, -mu));
        }
        Ok(bessel_i_scaled(mu, z)? * libm::exp(z - mu * libm::log(z)))
    }

    /// K_mu(z) / z^mu for z > 0.
    pub(crate) fn k_over_pow(&self, z: f64) -> Result<f64> {
        Ok(bessel_k_scaled(self.mu, z)? * libm::exp(-z - self.mu * libm::log(z)))
    }

    /// K_mu(t) / I_mu(t), overflow-safe for moderate t.
    fn k_over_i(&self, t: f64) -> Result<f64> {
        let (i, k) = ik_scaled(self.mu, t)?;
        let r = k / i * libm::exp(-2.0 * t);
        if !r.is_finite() {
            let ln = ln_bessel_k(self.mu, t)? - ln_bessel_i(self.mu, t)?;
            return Err(Error::Range { what: "K/I", log_value: ln });
        }
        Ok(r)
    }

    /// Renormalization factor c(t) = (t/2)^mu / (Gamma(nu/2) I_mu(t)).
    pub fn renorm_factor(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(domain("renorm_factor requires t > 0"));
        }
        let mu = self.mu;
        Ok(libm::pow(2.0, -mu) / (self.gamma_half_nu * self.i_over_pow(t)?))
    }

    /// ln G(t); finite for every t in (0, 1] down to 1e-300.
    pub fn ln_g(&self, t: f64) -> Result<f64> {
        self.require_p1("G")?;
        check_radius(t, "g_fn")?;
        if t < 1e-100 {
            return Ok(libm::log(self.kappa) + ln_bessel_k(self.mu, t)? - ln_bessel_i(self.mu, t)?);
        }
        Ok(libm::log(self.kappa * self.k_over_i(t)?))
    }

    /// Variance G(t) of the renormalized average at radius t.
    pub fn g_fn(&self, t: f64) -> Result<f64> {
        let ln = self.ln_g(t)?;
        if ln > 709.0 {
            return Err(Error::Range { what: "G", log_value: ln });
        }
        Ok(libm::exp(ln))
    }

    /// ln(-G'(t)), using the Wronskian: G'(t) = -kappa / (t I_mu(t)^2).
    pub fn ln_neg_g_prime(&self, t: f64) -> Result<f64> {
        self.require_p1("G'")?;
        check_radius(t, "g_prime")?;
        Ok(libm::log(self.kappa) - libm::log(t) - 2.0 * ln_bessel_i(self.mu, t)?)
    }

    pub fn g_prime(&self, t: f64) -> Result<f64> {
        Ok(-libm::exp(self.ln_neg_g_prime(t)?))
    }

    /// ln D(t) for t in (0, 1); -inf at t = 1.
    pub fn ln_d(&self, t: f64) -> Result<f64> {
        if t > 1.0 {
            return Err(domain("d_fn requires t <= 1"));
        }
        if t == 1.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(0.5 * (self.ln_g(t)? + libm::log(-libm::log(t))))
    }

    /// Thick-point normalizer D(t) = sqrt(-G(t) ln t).
    pub fn d_fn(&self, t: f64) -> Result<f64> {
        if t == 1.0 {
            return Ok(0.0);
        }
        let ln = self.ln_d(t)?;
        if ln > 709.0 {
            return Err(Error::Range { what: "D", log_value: ln });
        }
        Ok(libm::exp(ln))
    }

    /// D'(t) = (-G' ln t - G / t) / (2 D).
    pub fn d_prime(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 1.0) {
            return Err(domain("d_prime requires t in (0, 1)"));
        }
        let g = self.g_fn(t)?;
        let gp = self.g_prime(t)?;
        let lt = libm::log(t);
        Ok((-gp * lt - g / t) / (2.0 * libm::sqrt(-g * lt)))
    }

    /// Raw concentric covariance I_mu(t^s) K_mu(t v s) / (alpha (ts)^mu), p = 1.
    pub fn concentric_closed(&self, t: f64, s: f64) -> Result<f64> {
        self.require_p1("concentric_closed")?;
        if !(t > 0.0 && s > 0.0) || !t.is_finite() || !s.is_finite() {
            return Err(domain("concentric_closed requires t, s > 0"));
        }
        let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
        Ok(self.i_over_pow(lo)? * self.k_over_pow(hi)? / self.alpha)
    }

    /// Covariance of renormalized averages over disjoint balls.
    pub fn cov_disjoint(&self, dist: f64) -> Result<f64> {
        self.require_p1("cov_disjoint")?;
        if !(dist > 0.0) || !dist.is_finite() {
            return Err(domain("cov_disjoint requires dist > 0"));
        }
        Ok(self.inv_root * self.k_over_pow(dist)?)
    }

    /// Covariance when the ball of radius `t` contains the other one.
    pub fn cov_inclusion(&self, t: f64, dist: f64) -> Result<f64> {
        self.require_p1("cov_inclusion")?;
        check_radius(t, "cov_inclusion")?;
        if !(dist >= 0.0) || !dist.is_finite() {
            return Err(domain("cov_inclusion requires dist >= 0"));
        }
        Ok(self.inv_root * self.i_over_pow(dist)? * self.k_over_i(t)?)
    }

    /// Renormalized covariance Cov(theta_t(x), theta_s(y)) with |x - y| = dist.
    pub fn cov_general(&self, t: f64, s: f64, dist: f64) -> Result<KernelValue> {
        self.require_p1("cov_general")?;
        check_radius(t, "cov_general")?;
        check_radius(s, "cov_general")?;
        if !(dist >= 0.0) || !dist.is_finite() {
            return Err(domain("cov_general requires dist >= 0"));
        }
        let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
        let margin = 1e-12 * (t + s);
        if dist == 0.0 {
            return Ok(KernelValue::closed(self.g_fn(hi)?, Method::ClosedConcentric));
        }
        if dist >= t + s - margin {
            return Ok(KernelValue::closed(self.cov_disjoint(dist)?, Method::ClosedDisjoint));
        }
        if hi >= dist + lo - margin {
            return Ok(KernelValue::closed(self.cov_inclusion(hi, dist)?, Method::ClosedInclusion));
        }
        match self.cfg.overlap {
            OverlapMethod::SphereAverage => self.overlap_sphere_average(hi, lo, dist),
            OverlapMethod::Quadrature => {
                let raw = self.raw_cov_quadrature(hi, lo, dist)?;
                let c = self.renorm_factor(hi)? * self.renorm_factor(lo)?;
                Ok(KernelValue { value: c * raw.value, method: Method::Quadrature, est_error: c * raw.est_error })
            }
        }
    }

    /// Intrinsic L2 distance between theta_t(x) and theta_s(y).
    pub fn intrinsic_metric(&self, t: f64, s: f64, dist: f64) -> Result<f64> {
        let gt = self.g_fn(t)?;
        let gs = self.g_fn(s)?;
        let c = self.cov_general(t, s, dist)?.value;
        let r = gt + gs - 2.0 * c;
        if r < 0.0 {
            let scale = if t <= s { gt } else { gs };
            if r < -1e-12 * scale {
                return Err(Error::NotPositiveDefinite { min_pivot: r });
            }
            return Ok(0.0);
        }
        Ok(libm::sqrt(r))
    }

    /// Psi(w) = 1 - 2^mu Gamma(mu + 1) w^{-mu} J_mu(w).
    pub fn psi_fn(&self, w: f64) -> Result<f64> {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(domain("psi_fn requires w >= 0"));
        }
        let h = 0.5 * self.cfg.nu as f64;
        if w < 3.0 {
            let y = 0.25 * w * w;
            let mut term = 1.0;
            let mut sum = 0.0;
            let mut m = 1.0;
            while m < 200.0 {
                term *= -y / (m * (h + m - 1.0));
                sum -= term;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
                m += 1.0;
            }
            return Ok(sum);
        }
        let lead = libm::exp(self.mu * libm::log(2.0 / w)) * self.gamma_half_nu;
        Ok(1.0 - lead * bessel_j(self.mu, w)?)
    }

    /// Brownian clock tau(t) = G(t) - G(1).
    pub fn clock(&self, t: f64) -> Result<f64> {
        Ok(self.g_fn(t)? - self.g_fn(1.0)?)
    }

    /// Radius t with clock(t) = tau, by bisection in ln t.
    pub fn clock_inverse(&self, tau: f64) -> Result<f64> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(domain("clock_inverse requires tau >= 0"));
        }
        if tau == 0.0 {
            return Ok(1.0);
        }
        let g1 = self.g_fn(1.0)?;
        let target = libm::log(tau + g1);
        let mut lo = libm::log(1e-300);
        let mut hi = 0.0;
        if self.ln_g(1e-300)? < target {
            return Err(Error::Range { what: "clock_inverse", log_value: target });
        }
        // ln G is decreasing in ln t
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.ln_g(libm::exp(mid))? > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 {
                break;
            }
        }
        Ok(libm::exp(0.5 * (lo + hi)))
    }

    /// Cameron-Martin energy of the drift between two radii:
    /// (int_{s_cur}^{s_prev} (-D') F dt, F(s_prev) D(s_prev)) with F = D'/G'.
    pub fn shift_energy(&self, s_prev: f64, s_cur: f64) -> Result<(f64, f64)> {
        if !(s_cur > 0.0 && s_cur < s_prev && s_prev < 1.0) {
            return Err(domain("shift_energy requires 0 < s_cur < s_prev < 1"));
        }
        let u0 = -libm::log(s_prev);
        let u1 = -libm::log(s_cur);
        let panels = 16usize;
        let breaks: alloc::vec::Vec<f64> =
            (0..=panels).map(|k| u0 + (u1 - u0) * k as f64 / panels as f64).collect();
        // t = e^-u, dt = -t du
        let r = integrate(
            |u| {
                let t = libm::exp(-u);
                let dp = self.d_prime(t)?;
                Ok(-dp * dp / self.g_prime(t)? * t)
            },
            &breaks,
            QuadOptions { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: self.cfg.quad_max_subdiv },
        )?;
        let boundary = self.d_prime(s_prev)? / self.g_prime(s_prev)? * self.d_fn(s_prev)?;
        Ok((r.value, boundary))
    }
}

impl Covariance for Kernel {
    fn nu(&self) -> u32 {
        self.cfg.nu
    }

    fn cov(&self, t: f64, s: f64, dist: f64) -> Result<KernelValue> {
        self.cov_general(t, s, dist)
    }

    fn variance(&self, t: f64) -> Result<f64> {
        self.g_fn(t)
    }
}
