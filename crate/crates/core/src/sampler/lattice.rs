use alloc::vec::Vec;

use super::sequence::ScaleSequence;
use crate::error::{invalid, Result};

/// One level of the multi-scale partition of the cube [-1, 1]^nu into
/// `per_axis^nu` equal cells.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeLevel {
    pub n: usize,
    pub radius: f64,
    pub per_axis: usize,
    /// ln of the ideal count r_n^{-nu}.
    pub ideal_ln_count: f64,
    /// True when the cap forced cells coarser than 2 r_n.
    pub capped: bool,
}

impl LatticeLevel {
    pub fn count(&self, nu: u32) -> usize {
        self.per_axis.pow(nu)
    }

    pub fn cell_side(&self) -> f64 {
        2.0 / self.per_axis as f64
    }

    /// Center of cell `j`; axis 0 varies slowest.
    pub fn center(&self, j: usize, out: &mut [f64]) {
        let m = self.per_axis;
        let mut rest = j;
        for x in out.iter_mut().rev() {
            let k = rest % m;
            rest /= m;
            *x = (2 * k + 1) as f64 / m as f64 - 1.0;
        }
    }

    /// Cell containing `x`; the last cell on each axis is closed.
    pub fn cell_of(&self, x: &[f64]) -> usize {
        let m = self.per_axis;
        x.iter().fold(0, |acc, &c| {
            let k = (((c + 1.0) * 0.5 * m as f64) as usize).min(m - 1);
            acc * m + k
        })
    }
}

/// Nested partitions: every level-(n+1) cell lies inside one level-n cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLattice {
    pub nu: u32,
    pub per_level_cap: u64,
    pub levels: Vec<LatticeLevel>,
}

impl MultiLattice {
    pub fn level(&self, n: usize) -> &LatticeLevel {
        &self.levels[n]
    }

    pub fn count(&self, n: usize) -> usize {
        self.levels[n].count(self.nu)
    }

    /// Index of the level-`coarse` cell containing level-`fine` cell `j`.
    pub fn ancestor(&self, fine: usize, j: usize, coarse: usize) -> usize {
        let nu = self.nu as usize;
        let mf = self.levels[fine].per_axis;
        let mc = self.levels[coarse].per_axis;
        let ratio = mf / mc;
        let mut digits = [0usize; 16];
        let mut rest = j;
        for d in digits[..nu].iter_mut().rev() {
            *d = rest % mf;
            rest /= mf;
        }
        digits[..nu].iter().fold(0, |acc, &k| acc * mc + k / ratio)
    }
}

fn axis_cap(nu: u32, cap: u64) -> usize {
    let mut m = libm::pow(cap as f64, 1.0 / nu as f64) as u64;
    while (m + 1).checked_pow(nu).is_some_and(|v| v <= cap) {
        m += 1;
    }
    while m > 1 && m.checked_pow(nu).is_none_or(|v| v > cap) {
        m -= 1;
    }
    m as usize
}

/// Cells of side 2 r_n where the cap allows it, otherwise the finest nested
/// refinement with at most `per_level_cap` cells.
pub fn build_lattice(nu: u32, seq: &ScaleSequence, per_level_cap: u64) -> Result<MultiLattice> {
    if !(1..=16).contains(&nu) {
        return Err(invalid("lattice dimension must be in 1..=16"));
    }
    if 2u64.checked_pow(nu).is_none_or(|min| per_level_cap < min) {
        return Err(invalid("per-level cap must be at least 2^nu"));
    }
    let cap_axis = axis_cap(nu, per_level_cap);
    let mut levels: Vec<LatticeLevel> = Vec::with_capacity(seq.len());
    for (n, (&r, &ln_r)) in seq.radii().iter().zip(seq.ln_radii()).enumerate() {
        let inv = libm::exp(-ln_r);
        let ideal = if inv > 1e15 { usize::MAX } else { libm::ceil(inv * (1.0 - 1e-12)) as usize };
        let prev = levels.last().map_or(1, |l| l.per_axis);
        let want = ideal.max(prev);
        let mut m = if want > cap_axis { usize::MAX } else { want.div_ceil(prev) * prev };
        if m > cap_axis {
            m = (cap_axis / prev).max(1) * prev;
        }
        levels.push(LatticeLevel {
            n,
            radius: r,
            per_axis: m,
            ideal_ln_count: -(nu as f64) * ln_r,
            capped: m < ideal,
        });
    }
    Ok(MultiLattice { nu, per_level_cap, levels })
}
