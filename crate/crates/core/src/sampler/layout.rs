use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::gaussian::SymMatrix;
use super::lattice::MultiLattice;
use super::sequence::ScaleSequence;
use crate::error::{invalid, Error, Result};
use crate::kernels::Covariance;

pub const DEFAULT_MAX_POINTS: usize = 4096;

/// Radii carried by each site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathSpan {
    /// Every radius r_0..=r_n at a level-n site.
    Full,
    /// The last `k` radii r_{n-k+1}..=r_n.
    Last(usize),
}

/// Contiguous run of variables for the sites of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteBlock {
    pub level: usize,
    pub first_radius: usize,
    pub width: usize,
    pub cells: usize,
    pub offset: usize,
}

impl SiteBlock {
    pub fn len(&self) -> usize {
        self.cells * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A variable: the average at radius index `radius` around the center of
/// cell `cell` of level `level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variable {
    pub level: usize,
    pub cell: usize,
    pub radius: usize,
}

/// Which averages a sampled field carries and where they sit in the vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldLayout {
    pub seq: ScaleSequence,
    pub lattice: MultiLattice,
    pub span: PathSpan,
    blocks: Vec<SiteBlock>,
    centers: Vec<Vec<f64>>,
    len: usize,
}

impl FieldLayout {
    pub fn new(
        seq: ScaleSequence,
        lattice: MultiLattice,
        site_levels: impl IntoIterator<Item = usize>,
        span: PathSpan,
    ) -> Result<Self> {
        if lattice.levels.len() != seq.len() {
            return Err(invalid("lattice and sequence have different level counts"));
        }
        let nu = lattice.nu as usize;
        let mut levels: Vec<usize> = site_levels.into_iter().collect();
        levels.sort_unstable();
        levels.dedup();
        if levels.is_empty() {
            return Err(invalid("a layout needs at least one site level"));
        }
        let mut blocks = Vec::with_capacity(levels.len());
        let mut centers = Vec::with_capacity(levels.len());
        let mut offset = 0usize;
        for &n in &levels {
            if n >= seq.len() {
                return Err(invalid(format!("site level {n} beyond the sequence")));
            }
            let first = match span {
                PathSpan::Full => 0,
                PathSpan::Last(0) => return Err(invalid("path span must be positive")),
                PathSpan::Last(k) => (n + 1).saturating_sub(k),
            };
            let cells = lattice.count(n);
            let level = lattice.level(n);
            let mut c = alloc::vec![0.0; cells * nu];
            for (j, x) in c.chunks_exact_mut(nu).enumerate() {
                level.center(j, x);
            }
            let block = SiteBlock { level: n, first_radius: first, width: n + 1 - first, cells, offset };
            offset = offset
                .checked_add(block.len())
                .ok_or_else(|| Error::Resource("layout size overflows".into()))?;
            blocks.push(block);
            centers.push(c);
        }
        Ok(Self { seq, lattice, span, blocks, centers, len: offset })
    }

    pub fn nu(&self) -> u32 {
        self.lattice.nu
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn blocks(&self) -> &[SiteBlock] {
        &self.blocks
    }

    pub fn block(&self, level: usize) -> Option<&SiteBlock> {
        self.blocks.iter().find(|b| b.level == level)
    }

    fn block_pos(&self, level: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.level == level)
    }

    pub fn index(&self, v: Variable) -> Option<usize> {
        let b = self.block(v.level)?;
        if v.cell >= b.cells || v.radius < b.first_radius || v.radius > b.level {
            return None;
        }
        Some(b.offset + v.cell * b.width + (v.radius - b.first_radius))
    }

    pub fn variable(&self, idx: usize) -> Variable {
        let k = self.blocks.partition_point(|b| b.offset <= idx) - 1;
        let b = &self.blocks[k];
        let local = idx - b.offset;
        Variable { level: b.level, cell: local / b.width, radius: b.first_radius + local % b.width }
    }

    pub fn center(&self, level: usize, cell: usize) -> &[f64] {
        let nu = self.nu() as usize;
        let k = self.block_pos(level).expect("level has no sites");
        &self.centers[k][cell * nu..(cell + 1) * nu]
    }

    /// Averages r_first..=r_n at one site, as a slice of `values`.
    pub fn path<'a>(&self, values: &'a [f64], level: usize, cell: usize) -> &'a [f64] {
        let b = self.block(level).expect("level has no sites");
        let start = b.offset + cell * b.width;
        &values[start..start + b.width]
    }

    pub fn value(&self, values: &[f64], v: Variable) -> Option<f64> {
        self.index(v).map(|i| values[i])
    }

    /// Center distance in a canonical form: sorted per-axis gaps, so equal
    /// configurations give bit-equal results.
    pub fn distance(&self, a: Variable, b: Variable) -> f64 {
        let (ca, cb) = (self.center(a.level, a.cell), self.center(b.level, b.cell));
        let mut gaps = [0.0f64; 16];
        let nu = ca.len();
        for (g, (x, y)) in gaps.iter_mut().zip(ca.iter().zip(cb)) {
            *g = (x - y).abs();
        }
        let gaps = &mut gaps[..nu];
        gaps.sort_unstable_by(f64::total_cmp);
        libm::sqrt(gaps.iter().map(|g| g * g).sum())
    }

    pub fn check_size(&self, max_points: usize) -> Result<()> {
        if self.len > max_points {
            return Err(Error::Resource(format!(
                "{} field variables exceed the limit of {max_points}",
                self.len
            )));
        }
        Ok(())
    }
}

/// Covariance between two variables of a layout.
pub fn covariance_entry<C: Covariance + ?Sized>(
    cov: &C,
    layout: &FieldLayout,
    a: Variable,
    b: Variable,
) -> Result<f64> {
    let (t, s) = (layout.seq.radius(a.radius), layout.seq.radius(b.radius));
    if a == b {
        return cov.variance(t);
    }
    Ok(cov.cov(t, s, layout.distance(a, b))?.value)
}

/// The full covariance matrix of a layout, evaluating each distinct
/// (radius pair, distance) configuration once.
pub fn assemble_covariance<C: Covariance + ?Sized>(
    cov: &C,
    layout: &FieldLayout,
    max_points: usize,
) -> Result<SymMatrix> {
    layout.check_size(max_points)?;
    let n = layout.len();
    let vars: Vec<Variable> = (0..n).map(|i| layout.variable(i)).collect();
    let mut memo: BTreeMap<(usize, usize, u64), f64> = BTreeMap::new();
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let (a, b) = (vars[i], vars[j]);
            let d = if a == b { 0.0 } else { layout.distance(a, b) };
            let key = (a.radius.min(b.radius), a.radius.max(b.radius), d.to_bits());
            let v = match memo.get(&key) {
                Some(&v) => v,
                None => {
                    let v = covariance_entry(cov, layout, a, b)?;
                    memo.insert(key, v);
                    v
                }
            };
            m.set(i, j, v);
        }
    }
    Ok(m)
}
