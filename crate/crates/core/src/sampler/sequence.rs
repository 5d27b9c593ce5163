use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::error::{invalid, Result};

/// Family a [`ScaleSequence`] was generated from.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    /// r_n = 2^{-2^{n^2} + 1}
    PaperDoubleExp,
    /// r_0 = 1, r_n = rho^{c^n} for n >= 1
    GeometricPower { rho: f64, c: f64 },
    Custom,
}

/// Strictly decreasing radii r_0 = 1 > r_1 > ... > r_N with the two growth
/// diagnostics n^2 ln r_{n-1} / ln r_n and ln(-ln r_{n+1}) / (-ln r_n).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSequence {
    pub kind: SequenceKind,
    radii: Vec<f64>,
    ln_radii: Vec<f64>,
    pub cond1_diag: Vec<f64>,
    pub cond2_diag: Vec<f64>,
    /// Number of levels asked for when fewer were representable.
    pub requested_levels: usize,
}

pub const DEFAULT_UNDERFLOW_FLOOR: f64 = 1e-300;

impl ScaleSequence {
    fn from_parts(kind: SequenceKind, radii: Vec<f64>, ln_radii: Vec<f64>, requested: usize) -> Result<Self> {
        if ln_radii.is_empty() || ln_radii[0] != 0.0 {
            return Err(invalid("a scale sequence must start at r_0 = 1"));
        }
        for w in ln_radii.windows(2) {
            if !(w[1] < w[0]) || !w[1].is_finite() {
                return Err(invalid("radii must be finite and strictly decreasing"));
            }
        }
        let n = ln_radii.len();
        let cond1 = (1..n)
            .map(|k| (k * k) as f64 * ln_radii[k - 1] / ln_radii[k])
            .collect();
        let cond2 = (1..n.saturating_sub(1))
            .map(|k| libm::log(-ln_radii[k + 1]) / -ln_radii[k])
            .collect();
        Ok(Self {
            kind,
            radii,
            ln_radii,
            cond1_diag: cond1,
            cond2_diag: cond2,
            requested_levels: requested,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn ln_radii(&self) -> &[f64] {
        &self.ln_radii
    }

    /// Number of radii, N + 1.
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn radius(&self, n: usize) -> f64 {
        self.radii[n]
    }

    pub fn truncated(&self) -> bool {
        self.requested_levels > self.len()
    }
}

/// Builds the first `levels` radii of a sequence, stopping early (and
/// recording it) when a radius would fall below `floor`.
pub fn make_sequence(kind: SequenceKind, levels: usize, floor: f64) -> Result<ScaleSequence> {
    if levels == 0 {
        return Err(invalid("a sequence needs at least one level"));
    }
    if !(floor > 0.0) {
        return Err(invalid("underflow floor must be positive"));
    }
    let ln_floor = libm::log(floor);
    let mut logs = Vec::with_capacity(levels);
    let mut radii = Vec::with_capacity(levels);
    match kind {
        SequenceKind::PaperDoubleExp => {
            for n in 0..levels {
                let e = (n * n) as f64;
                if e > 60.0 {
                    break;
                }
                let x = 1.0 - libm::exp2(e);
                let l = x * LN_2;
                if l < ln_floor {
                    break;
                }
                logs.push(l);
                radii.push(libm::exp2(x));
            }
        }
        SequenceKind::GeometricPower { rho, c } => {
            if !(rho > 0.0 && rho < 1.0) || !(c > 1.0) || !c.is_finite() {
                return Err(invalid("geometric_power needs rho in (0, 1) and c > 1"));
            }
            logs.push(0.0);
            radii.push(1.0);
            for n in 1..levels {
                let e = libm::pow(c, n as f64);
                let l = e * libm::log(rho);
                if l < ln_floor {
                    break;
                }
                logs.push(l);
                radii.push(libm::pow(rho, e));
            }
        }
        SequenceKind::Custom => return Err(invalid("custom sequences are built with custom_sequence")),
    }
    ScaleSequence::from_parts(kind, radii, logs, levels)
}

/// A user-supplied list of radii, checked for r_0 = 1, strict decrease and
/// the underflow floor.
pub fn custom_sequence(radii: &[f64], floor: f64) -> Result<ScaleSequence> {
    if radii.iter().any(|&r| !(r >= floor) || !(r <= 1.0)) {
        return Err(invalid("custom radii must lie in [floor, 1]"));
    }
    let logs = radii.iter().map(|&r| libm::log(r)).collect();
    ScaleSequence::from_parts(SequenceKind::Custom, radii.to_vec(), logs, radii.len())
}

/// Summary of the two growth conditions over the available prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDiagnostics {
    pub max_cond1: f64,
    pub max_cond2: f64,
    pub last_cond1: f64,
    pub last_cond2: f64,
    /// True when both diagnostics decay over the prefix; the conditions are
    /// asymptotic, so false is a warning, never a rejection.
    pub pass: bool,
}

pub fn validate_sequence(seq: &ScaleSequence) -> SequenceDiagnostics {
    // level 1 is skipped for cond1: ln r_0 = 0 makes it trivially 0
    let c1 = seq.cond1_diag.get(1..).unwrap_or(&[]);
    let c2 = &seq.cond2_diag[..];
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NAN, f64::max);
    let decays = |v: &[f64]| v.len() >= 2 && v[v.len() - 1] < v[0];
    SequenceDiagnostics {
        max_cond1: max(c1),
        max_cond2: max(c2),
        last_cond1: c1.last().copied().unwrap_or(f64::NAN),
        last_cond2: c2.last().copied().unwrap_or(f64::NAN),
        pass: decays(c1) && (c2.len() < 2 || decays(c2)),
    }
}
