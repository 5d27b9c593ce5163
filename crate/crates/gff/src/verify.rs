//! Oracle suites behind `gff verify`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use gff_core::kernels::{Kernel, KernelConfig};
use gff_core::measures::cube_self_energy;
use gff_core::qmc;
use gff_core::sampler::{
    build_lattice, custom_sequence, ln_increment_variances, make_sequence, sample_concentric, FieldLayout, PathSpan,
    SequenceKind, DEFAULT_UNDERFLOW_FLOOR,
};
use gff_core::specfun::{bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled};
use gff_core::thickpoints::{prob_estimates, RadiusTable, ThickConfig};
use serde::Serialize;

use crate::drivers::assemble_parallel;
use crate::error::{GffError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Specfun,
    Covariance,
    Sampler,
    Probabilities,
    Energy,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Specfun => "specfun",
            Self::Covariance => "covariance",
            Self::Sampler => "sampler",
            Self::Probabilities => "probabilities",
            Self::Energy => "energy",
        })
    }
}

impl FromStr for Suite {
    type Err = GffError;

    fn from_str(s: &str) -> Result<Self> {
        <Self as clap::ValueEnum>::from_str(s, false).map_err(|_| GffError::Config(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Worst error, or the statistic compared with the tolerance.
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, pass: measured <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    fn new(suite: Suite, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { suite: suite.to_string(), checks, pass }
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }
}

/// Suite options; `None` picks the suite's default.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub nu: Option<u32>,
    pub cases: Option<usize>,
    pub tol: Option<f64>,
    pub seed: u64,
}

pub fn run(suite: Suite, opt: &Options) -> Result<Report> {
    let checks = match suite {
        Suite::Specfun => specfun(opt)?,
        Suite::Covariance => covariance(opt)?,
        Suite::Sampler => sampler(opt)?,
        Suite::Probabilities => probabilities(opt)?,
        Suite::Energy => energy(opt)?,
    };
    Ok(Report::new(suite, checks))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn logspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

/// Randomized Halton points in (lo, hi)^dim.
fn cases(seed: u64, n: usize, dim: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut sh = vec![0.0; dim];
    qmc::shift(seed, 0, &mut sh);
    let mut out = vec![0.0; dim];
    (0..n as u64)
        .map(|i| {
            qmc::shifted_point(i, &sh, &mut out);
            out.iter().map(|u| lo + (hi - lo) * u).collect()
        })
        .collect()
}

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |m, x| Ok(m.max(x?)))
}

fn specfun(opt: &Options) -> Result<Vec<Check>> {
    let n = opt.cases.unwrap_or(200);
    let wr = max_of([0.5, 1.0, 1.5, 2.0, 2.5].iter().flat_map(|&mu| {
        logspace(0.01, 50.0, n).map(move |z| {
            // the exponential scalings cancel in each product
            let w = bessel_i_scaled(mu, z)? * bessel_k_scaled(mu + 1.0, z)?
                + bessel_i_scaled(mu + 1.0, z)? * bessel_k_scaled(mu, z)?;
            Ok((z * w - 1.0).abs())
        })
    }))?;
    let half = max_of(logspace(0.01, 50.0, n).map(|z| {
        let c = (2.0 / (PI * z)).sqrt();
        let k = (PI / (2.0 * z)).sqrt() * (-z).exp();
        let mut e = rel(bessel_i(0.5, z)?, c * z.sinh());
        e = e.max(rel(bessel_k(0.5, z)?, k));
        e = e.max(rel(bessel_k(1.5, z)?, k * (1.0 + 1.0 / z)));
        if z >= 0.5 {
            // cosh - sinh/z cancels for small z
            e = e.max(rel(bessel_i(1.5, z)?, c * (z.cosh() - z.sinh() / z)));
        }
        Ok(e)
    }))?;
    Ok(vec![
        Check::at_most("wronskian_relative", wr, opt.tol.unwrap_or(1e-11)),
        Check::at_most("half_integer_closed_forms", half, 1e-12),
    ])
}

fn kernel(nu: u32, p: u32) -> Result<Kernel> {
    Ok(Kernel::new(KernelConfig::new(nu, p)?)?)
}

fn covariance(opt: &Options) -> Result<Vec<Check>> {
    let nu = opt.nu.unwrap_or(3);
    let n = opt.cases.unwrap_or(200);
    let k = kernel(nu, 1)?;
    let pts = cases(opt.seed, n, 2, 0.01, 1.0);
    let quad = max_of(pts.iter().map(|ts| {
        let (t, s) = (ts[0], ts[1]);
        let c = k.renorm_factor(t)? * k.renorm_factor(s)?;
        Ok(rel(c * k.raw_cov_quadrature(t, s, 0.0)?.value, k.cov_general(t, s, 0.0)?.value))
    }))?;
    let mut checks = vec![Check::at_most(format!("concentric_vs_quadrature_nu{nu}"), quad, opt.tol.unwrap_or(1e-6))];
    if nu == 3 {
        let g = max_of(logspace(1e-3, 1.0, 50).map(|t| Ok(rel(k.g_fn(t)?, (-t).exp() / (4.0 * PI * t.sinh())))))?;
        let d = max_of(logspace(1e-2, 10.0, 50).map(|r| Ok(rel(k.cov_disjoint(r)?, (-r).exp() / (4.0 * PI * r)))))?;
        checks.push(Check::at_most("nu3_variance_closed_form", g, 1e-10));
        checks.push(Check::at_most("nu3_disjoint_closed_form", d, 1e-10));
    }
    if nu >= 5 {
        let k2 = kernel(nu, 2)?;
        let e = max_of(
            cases(opt.seed ^ 0x5eed, 50, 2, 0.01, 1.0)
                .iter()
                .map(|ts| Ok(rel(k2.concentric_cov_p(ts[0], ts[1])?, k2.raw_cov_quadrature(ts[0], ts[1], 0.0)?.value))),
        )?;
        checks.push(Check::at_most(format!("p2_concentric_vs_quadrature_nu{nu}"), e, 1e-5));
    }
    let (c, stable) = intrinsic_metric_constant(&k)?;
    checks.push(Check::at_most("intrinsic_metric_constant", c, f64::MAX));
    checks.push(Check::at_most("intrinsic_metric_small_t_growth", stable, 1.05));
    Ok(checks)
}

/// Largest d^2 t^(nu-2) / min(sqrt(dist/t), 1) over a 32 x 32 grid of
/// t in [1e-3, 0.93] and dist in [1e-4, 2], and the ratio of the maxima over
/// the smallest-t and next-smallest-t rows (near 1 when the bound saturates).
pub fn intrinsic_metric_constant(k: &Kernel) -> Result<(f64, f64)> {
    let nu = k.config().nu as i32;
    let ts: Vec<f64> = logspace(1e-3, 0.93, 32).collect();
    let ds: Vec<f64> = logspace(1e-4, 2.0, 32).collect();
    let row_max = |t: f64| -> Result<f64> {
        max_of(ds.iter().map(|&d| {
            let m = k.intrinsic_metric(t, t, d)?;
            Ok(m * m * t.powi(nu - 2) / (d / t).sqrt().min(1.0))
        }))
    };
    let rows: Vec<f64> = ts.iter().map(|&t| row_max(t)).collect::<Result<_>>()?;
    let c = rows.iter().copied().fold(0.0, f64::max);
    Ok((c, rows[0] / rows[1]))
}

fn sampler(opt: &Options) -> Result<Vec<Check>> {
    let nu = opt.nu.unwrap_or(3);
    let n = opt.cases.unwrap_or(100_000);
    let k = kernel(nu, 1)?;
    let radii: Vec<f64> = (0..6).map(|i| (-(i as f64)).exp2()).collect();
    let seq = custom_sequence(&radii, DEFAULT_UNDERFLOW_FLOOR)?;
    let paths = sample_concentric(&k, &seq, n, opt.seed)?;
    let dg: Vec<f64> = ln_increment_variances(&k, &seq)?.into_iter().map(f64::exp).collect();
    let levels = seq.len();
    let incs: Vec<Vec<f64>> =
        paths.iter().map(|p| (0..levels).map(|i| if i == 0 { p[0] } else { p[i] - p[i - 1] }).collect()).collect();
    let nf = n as f64;
    let mut z_var = 0.0f64;
    for i in 0..levels {
        let var = incs.iter().map(|v| v[i] * v[i]).sum::<f64>() / nf;
        z_var = z_var.max((var - dg[i]).abs() / (dg[i] * (2.0 / nf).sqrt()));
    }
    let mut rho_max = 0.0f64;
    for i in 0..levels {
        for j in 0..i {
            let (mut sij, mut sii, mut sjj) = (0.0, 0.0, 0.0);
            for v in &incs {
                sij += v[i] * v[j];
                sii += v[i] * v[i];
                sjj += v[j] * v[j];
            }
            rho_max = rho_max.max((sij / (sii * sjj).sqrt()).abs());
        }
    }
    let (z_cov, _) = lattice_covariance_check(&k, 10_000, if opt.seed == 0 { 42 } else { opt.seed })?;
    Ok(vec![
        Check::at_most("increment_variance_chi2_se", z_var, 3.0),
        Check::at_most("increment_cross_correlation", rho_max, 3.0 / nf.sqrt()),
        Check::at_most("lattice_covariance_se", z_cov, 3.0),
    ])
}

/// Two-level field (radii 1 and 1/2, eight level-1 cells with full paths,
/// 16 variables): the largest |empirical - exact| covariance in standard
/// errors over `replicas` draws, and the number of entries compared.
pub fn lattice_covariance_check(k: &Kernel, replicas: usize, seed: u64) -> Result<(f64, usize)> {
    let nu = k.config().nu;
    let seq = custom_sequence(&[1.0, 0.5], DEFAULT_UNDERFLOW_FLOOR)?;
    let lattice = build_lattice(nu, &seq, 1 << 20)?;
    let layout = FieldLayout::new(seq, lattice, [1], PathSpan::Full)?;
    let cov = assemble_parallel(k, &layout, 500)?;
    let sampler = gff_core::sampler::GaussianSampler::new(&cov)?;
    let d = sampler.dim();
    let mut acc = vec![0.0; d * d];
    let (mut z, mut x) = (vec![0.0; d], vec![0.0; d]);
    for r in 0..replicas as u64 {
        sampler.sample_into(seed, r, &mut z, &mut x);
        for i in 0..d {
            for j in 0..=i {
                acc[i * d + j] += x[i] * x[j];
            }
        }
    }
    let nf = replicas as f64;
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..=i {
            let emp = acc[i * d + j] / nf;
            let (sij, sii, sjj) = (cov.get(i, j), cov.get(i, i), cov.get(j, j));
            let se = ((sii * sjj + sij * sij) / nf).sqrt();
            worst = worst.max((emp - sij).abs() / se);
        }
    }
    Ok((worst, d * (d + 1) / 2))
}

/// Ratio max/min of the fitted constants C_n, n >= 1, in
/// |ln W(P_n) - nu gamma ln r_n| <= C_n sqrt(-ln r_n).
pub fn probability_constant_spread(k: &Kernel, kind: SequenceKind, levels: usize, gamma: f64) -> Result<(Vec<f64>, f64)> {
    let seq = make_sequence(kind, levels, DEFAULT_UNDERFLOW_FLOOR)?;
    let table = RadiusTable::new(k, &seq)?;
    let cfg = ThickConfig::new(k.config().nu, gamma)?;
    let est = prob_estimates(&table, &cfg)?;
    let c: Vec<f64> = est.c_p[1..].to_vec();
    let (lo, hi) = c.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let spread = if c.iter().all(|x| x.is_finite() && *x > 0.0) { hi / lo } else { f64::INFINITY };
    Ok((c, spread))
}

fn probabilities(opt: &Options) -> Result<Vec<Check>> {
    let nu = opt.nu.unwrap_or(3);
    let k = kernel(nu, 1)?;
    let gamma = 0.5;
    let (_, paper) = probability_constant_spread(&k, SequenceKind::PaperDoubleExp, 4, gamma)?;
    let (_, geo) = probability_constant_spread(&k, SequenceKind::GeometricPower { rho: 0.1, c: 2.0 }, 9, gamma)?;
    // product rule and range on the geometric sequence
    let seq = make_sequence(SequenceKind::GeometricPower { rho: 0.1, c: 2.0 }, 9, DEFAULT_UNDERFLOW_FLOOR)?;
    let table = RadiusTable::new(&k, &seq)?;
    let est = prob_estimates(&table, &ThickConfig::new(nu, gamma)?)?;
    let mut prod_err = 0.0f64;
    let mut acc = 0.0;
    let mut in_range = true;
    for (n, t) in est.terms.iter().enumerate() {
        acc += t.ln_p;
        prod_err = prod_err.max((est.ln_phi[n] - acc).abs() / acc.abs().max(1.0));
        in_range &= t.ln_p < 0.0 && t.ln_p.is_finite();
    }
    Ok(vec![
        Check::at_most("paper_sequence_constant_spread", paper, 5.0),
        Check::at_most("geometric_sequence_constant_spread", geo, 5.0),
        Check::at_most("phi_product_rule", prod_err, 1e-12),
        Check { name: "probabilities_in_unit_interval".into(), measured: f64::from(u8::from(in_range)), tolerance: 1.0, pass: in_range },
    ])
}

/// Growth spreads (max/min) of energy/n^3 and boundary/n^2 for the shift
/// between s_{n-1} and s_n = 2^(-n^2), n = 3..=6.
pub fn shift_energy_spreads(k: &Kernel) -> Result<(f64, f64)> {
    let s = |n: i32| (-((n * n) as f64)).exp2();
    let mut e = Vec::new();
    let mut b = Vec::new();
    for n in 3..=6 {
        let (en, bn) = k.shift_energy(s(n - 1), s(n))?;
        e.push(en / f64::from(n).powi(3));
        b.push(bn / f64::from(n).powi(2));
    }
    let spread = |v: &[f64]| {
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        if lo > 0.0 { hi / lo } else { f64::INFINITY }
    };
    Ok((spread(&e), spread(&b)))
}

fn energy(opt: &Options) -> Result<Vec<Check>> {
    let k = kernel(opt.nu.unwrap_or(3), 1)?;
    let (se, sb) = shift_energy_spreads(&k)?;
    let mut cube = 0.0f64;
    for alpha in [0.25, 0.5, 0.75] {
        let (v, _) = cube_self_energy(1, alpha, 1 << 12)?;
        cube = cube.max(rel(v, 2.0 / ((1.0 - alpha) * (2.0 - alpha))));
    }
    Ok(vec![
        Check::at_most("shift_energy_over_n3_spread", se, 3.0),
        Check::at_most("shift_boundary_over_n2_spread", sb, 3.0),
        Check::at_most("segment_self_energy_closed_form", cube, opt.tol.unwrap_or(1e-9)),
    ])
}
