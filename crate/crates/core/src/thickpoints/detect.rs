use alloc::format;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use super::{RadiusTable, ThickConfig};
use crate::error::{invalid, Result};
use crate::sampler::{FieldLayout, SiteBlock};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectMode {
    Limsup,
    Sequential,
    PerfectSurrogate,
}

impl DetectMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Limsup => "limsup",
            Self::Sequential => "sequential",
            Self::PerfectSurrogate => "perfect_surrogate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCells {
    pub level: usize,
    pub cells: Vec<usize>,
}

/// Cells of the finest site level flagged by one detector on one field.
#[derive(Debug, Clone, PartialEq)]
pub struct ThickPointReport {
    pub mode: DetectMode,
    pub gamma: f64,
    pub threshold: f64,
    pub tol: f64,
    pub window: usize,
    /// Level whose cell centers are tested.
    pub level: usize,
    /// Radius indices the ratios were taken at.
    pub radii: RangeInclusive<usize>,
    pub detected: Vec<usize>,
    /// Pinning-event sets, filled by the sequential detector when the
    /// layout carries full paths.
    pub xi: Vec<LevelCells>,
}

impl ThickPointReport {
    pub fn count(&self) -> usize {
        self.detected.len()
    }
}

fn finest_window(layout: &FieldLayout, window: usize) -> Result<(&SiteBlock, RangeInclusive<usize>)> {
    let b = layout.blocks().last().ok_or_else(|| invalid("layout has no sites"))?;
    if window == 0 {
        return Err(invalid("window must be at least 1"));
    }
    let lo = (b.level + 1).checked_sub(window).filter(|&lo| lo >= b.first_radius.max(1));
    match lo {
        Some(lo) => Ok((b, lo..=b.level)),
        None => Err(invalid(format!(
            "window of {window} radii needs radii below r_0 that level {} does not carry",
            b.level
        ))),
    }
}

fn scan(
    layout: &FieldLayout,
    table: &RadiusTable,
    values: &[f64],
    window: usize,
    keep: impl Fn(&mut dyn Iterator<Item = f64>) -> bool,
) -> Result<(usize, RangeInclusive<usize>, Vec<usize>)> {
    let (b, radii) = finest_window(layout, window)?;
    let mut out = Vec::new();
    for j in 0..b.cells {
        let path = layout.path(values, b.level, j);
        let mut it = radii.clone().map(|i| table.ratio(path[i - b.first_radius], i));
        if keep(&mut it) {
            out.push(j);
        }
    }
    Ok((b.level, radii, out))
}

fn report(
    mode: DetectMode,
    cfg: &ThickConfig,
    window: usize,
    (level, radii, detected): (usize, RangeInclusive<usize>, Vec<usize>),
) -> ThickPointReport {
    ThickPointReport {
        mode,
        gamma: cfg.gamma,
        threshold: cfg.threshold(),
        tol: cfg.tol,
        window,
        level,
        radii,
        detected,
        xi: Vec::new(),
    }
}

/// Flags finest-level centers whose largest ratio over the window reaches
/// threshold - tol.
pub fn detect_limsup(layout: &FieldLayout, table: &RadiusTable, values: &[f64], cfg: &ThickConfig) -> Result<ThickPointReport> {
    let bar = cfg.threshold() - cfg.tol;
    let hits = scan(layout, table, values, cfg.window, |it| it.fold(f64::NEG_INFINITY, f64::max) >= bar)?;
    Ok(report(DetectMode::Limsup, cfg, cfg.window, hits))
}

fn within(cfg: &ThickConfig) -> impl Fn(&mut dyn Iterator<Item = f64>) -> bool {
    let thr = cfg.threshold();
    let tol = cfg.tol;
    move |it| {
        for r in it {
            if !((r - thr).abs() <= tol) {
                return false;
            }
        }
        true
    }
}

/// Flags centers whose ratios lie within tol of the threshold at every
/// window radius; also reports the pinning-event sets when available.
pub fn detect_sequential(layout: &FieldLayout, table: &RadiusTable, values: &[f64], cfg: &ThickConfig) -> Result<ThickPointReport> {
    let hits = scan(layout, table, values, cfg.window, within(cfg))?;
    let mut rep = report(DetectMode::Sequential, cfg, cfg.window, hits);
    if layout.blocks().iter().all(|b| b.first_radius == 0) {
        rep.xi = xi_sets(layout, table, values, cfg)?;
    }
    Ok(rep)
}

/// Number of finest-level centers within tol of the threshold at all of the
/// `window` finest radii.
pub fn perfect_surrogate_scan(
    layout: &FieldLayout,
    table: &RadiusTable,
    values: &[f64],
    cfg: &ThickConfig,
    window: usize,
) -> Result<usize> {
    if window < 2 {
        return Err(invalid("perfect surrogate scan needs a window of at least 2"));
    }
    if !(cfg.gamma > 0.0) {
        return Err(invalid("perfect surrogate scan needs gamma > 0"));
    }
    Ok(scan(layout, table, values, window, within(cfg))?.2.len())
}

/// Cells of each site level whose whole path satisfies the pinning events
/// |theta_0 - a D(r_0)| <= sqrt(G(r_0)) and
/// |d theta_i - a dD_i| <= sqrt(dG_i), a = sqrt(2 nu gamma).
pub fn xi_sets(layout: &FieldLayout, table: &RadiusTable, values: &[f64], cfg: &ThickConfig) -> Result<Vec<LevelCells>> {
    layout
        .blocks()
        .iter()
        .map(|b| Ok(LevelCells { level: b.level, cells: xi_set(layout, table, values, cfg, b.level)? }))
        .collect()
}

/// The pinning-event set of one site level.
pub fn xi_set(layout: &FieldLayout, table: &RadiusTable, values: &[f64], cfg: &ThickConfig, level: usize) -> Result<Vec<usize>> {
    let b = layout.block(level).ok_or_else(|| invalid(format!("level {level} has no sites")))?;
    if b.first_radius != 0 {
        return Err(invalid(format!("level {level} sites do not carry the full path")));
    }
    let a = cfg.threshold();
    let centre: Vec<f64> = table.ln_dd[..=level].iter().map(|&l| a * libm::exp(l)).collect();
    let half: Vec<f64> = table.ln_dg[..=level].iter().map(|&l| libm::exp(0.5 * l)).collect();
    Ok((0..b.cells)
        .filter(|&j| {
            let p = layout.path(values, level, j);
            (0..p.len()).all(|i| {
                let inc = if i == 0 { p[0] } else { p[i] - p[i - 1] };
                (inc - centre[i]).abs() <= half[i]
            })
        })
        .collect())
}

/// Cells of site level `level` whose own-radius ratio reaches
/// threshold - tol.
pub fn exceedance_cells(layout: &FieldLayout, table: &RadiusTable, values: &[f64], cfg: &ThickConfig, level: usize) -> Result<Vec<usize>> {
    if level == 0 {
        return Err(invalid("ratios are undefined at r_0 = 1"));
    }
    let b = layout.block(level).ok_or_else(|| invalid(format!("level {level} has no sites")))?;
    let bar = cfg.threshold() - cfg.tol;
    Ok((0..b.cells)
        .filter(|&j| {
            let p = layout.path(values, level, j);
            table.ratio(p[p.len() - 1], level) >= bar
        })
        .collect())
}

/// Finite stand-in for the index set of the covering argument at dyadic
/// level `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperBoundCells {
    pub n: usize,
    pub total_cells: usize,
    pub cells: Vec<usize>,
    /// Number of (center, radius) samples that fell in the radius band.
    pub samples: usize,
}

/// Cubes of half-side 2^{-n} in which some sampled average with radius in
/// [2^{-n}, 2^{1-n}] exceeds sqrt(2 nu gamma') D(r).
pub fn upper_bound_cells(layout: &FieldLayout, table: &RadiusTable, values: &[f64], cfg: &ThickConfig, n: usize) -> Result<UpperBoundCells> {
    let nu = layout.nu() as usize;
    if n == 0 || n > 20 || nu * n > 40 {
        return Err(invalid("dyadic level out of range"));
    }
    if values.len() != layout.len() {
        return Err(invalid("field length does not match layout"));
    }
    let m = 1usize << n;
    let side = 2.0 / m as f64;
    let (lo, hi) = (-(n as f64) * core::f64::consts::LN_2, -((n - 1) as f64) * core::f64::consts::LN_2);
    let bar = super::threshold(cfg.nu, cfg.gamma_prime);
    let mut hit = alloc::vec![false; m.pow(nu as u32)];
    let mut samples = 0;
    let eps = 1e-12;
    for (idx, &value) in values.iter().enumerate() {
        let v = layout.variable(idx);
        let lr = table.ln_r[v.radius];
        if v.radius == 0 || lr < lo - eps || lr > hi + eps {
            continue;
        }
        samples += 1;
        if table.ratio(value, v.radius) <= bar {
            continue;
        }
        // every closed cube containing the center
        let c = layout.center(v.level, v.cell);
        let mut ranges = [(0usize, 0usize); 16];
        for (r, &x) in ranges.iter_mut().zip(c) {
            let f = (x + 1.0) / side;
            let k = libm::floor(f + 0.5);
            *r = if (f - k).abs() < 1e-9 {
                let k = k as usize;
                (k.saturating_sub(1), k.min(m - 1))
            } else {
                let k = (libm::floor(f) as usize).min(m - 1);
                (k, k)
            };
        }
        mark(&mut hit, &ranges[..nu], m, 0, 0);
    }
    let cells = hit.iter().enumerate().filter(|(_, &h)| h).map(|(j, _)| j).collect();
    Ok(UpperBoundCells { n, total_cells: hit.len(), cells, samples })
}

fn mark(hit: &mut [bool], ranges: &[(usize, usize)], m: usize, axis: usize, acc: usize) {
    if axis == ranges.len() {
        hit[acc] = true;
        return;
    }
    for k in ranges[axis].0..=ranges[axis].1 {
        mark(hit, ranges, m, axis + 1, acc * m + k);
    }
}
