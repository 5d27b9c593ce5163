//! Experiment drivers: covariance assembly and replica loops on a worker pool.
//!
//! Every parallel loop maps over an index range and collects in index order,
//! so results do not depend on the number of threads.

use gff_core::error::Error as CoreError;
use gff_core::kernels::{Covariance, Kernel};
use gff_core::measures::{build_measure, capacity_certificate, certificate_pass, total_mass, Certificate, EnergyEvaluator};
use gff_core::sampler::{
    build_lattice, covariance_entry, FieldLayout, GaussianSampler, MultiLattice, PathSpan, ScaleSequence, SymMatrix,
    Variable,
};
use gff_core::thickpoints::{
    box_dimension, detect_limsup, detect_sequential, dimension_from_counts, exceedance_cells, perfect_surrogate_scan,
    DetectMode, DimensionEstimate, RadiusTable, ThickConfig,
};
use rayon::prelude::*;

use crate::cache::CachedKernel;
use crate::config::ExperimentConfig;
use crate::container::{ContainerHeader, FieldContainer, LevelEntry};
use crate::error::{GffError, Result};

pub const THREADS_ENV: &str = "GFF_THREADS";

/// Worker count: `GFF_THREADS` wins over the flag; 0 means hardware
/// parallelism.
pub fn thread_count(flag: Option<usize>) -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| GffError::Config(format!("{THREADS_ENV} must be a non-negative integer, got '{v}'"))),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}

pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| GffError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// The covariance matrix of a layout with rows computed in parallel.
pub fn assemble_parallel<C: Covariance + Sync + ?Sized>(cov: &C, layout: &FieldLayout, max_points: usize) -> Result<SymMatrix> {
    layout.check_size(max_points)?;
    let n = layout.len();
    let vars: Vec<Variable> = (0..n).map(|i| layout.variable(i)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..=i).map(|j| covariance_entry(cov, layout, vars[i], vars[j])).collect::<std::result::Result<_, CoreError>>())
        .collect::<std::result::Result<_, CoreError>>()?;
    let mut m = SymMatrix::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// Kernel, sequence, lattice and radius table of one configuration.
#[derive(Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub kernel: CachedKernel,
    pub seq: ScaleSequence,
    pub lattice: MultiLattice,
    pub table: RadiusTable,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let kernel = Kernel::new(config.kernel_config()?)?;
        let seq = config.scale_sequence()?;
        let lattice = build_lattice(config.kernel.nu, &seq, config.lattice.per_level_cap)?;
        let table = RadiusTable::new(&kernel, &seq)?;
        Ok(Self { config, kernel: CachedKernel::new(kernel), seq, lattice, table })
    }

    pub fn nu(&self) -> u32 {
        self.config.kernel.nu
    }

    pub fn finest(&self) -> usize {
        self.seq.len() - 1
    }

    pub fn layout(&self, site_levels: impl IntoIterator<Item = usize>, span: PathSpan) -> Result<FieldLayout> {
        Ok(FieldLayout::new(self.seq.clone(), self.lattice.clone(), site_levels, span)?)
    }

    pub fn sampler(&self, layout: &FieldLayout) -> Result<GaussianSampler> {
        let cov = assemble_parallel(&self.kernel, layout, self.config.sampling.max_points)?;
        Ok(GaussianSampler::new(&cov)?)
    }

    pub fn thick(&self) -> Result<ThickConfig> {
        self.config.thick_config()
    }

    /// Runs `f` on every replica's field, in replica order.
    pub fn map_replicas<T, F>(&self, sampler: &GaussianSampler, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, &[f64]) -> Result<T> + Sync,
    {
        let seed = self.config.sampling.seed;
        let dim = sampler.dim();
        (0..self.config.sampling.replicas as u64)
            .into_par_iter()
            .map_init(
                || (vec![0.0; dim], vec![0.0; dim]),
                |(z, out), r| {
                    sampler.sample_into(seed, r, z, out);
                    f(r, out)
                },
            )
            .collect()
    }
}

/// Every level as a site level carrying full paths.
pub fn run_sample(exp: &Experiment) -> Result<(FieldLayout, FieldContainer)> {
    let layout = exp.layout(0..exp.seq.len(), PathSpan::Full)?;
    let sampler = exp.sampler(&layout)?;
    let rows = exp.map_replicas(&sampler, |_, v| Ok(v.to_vec()))?;
    let cfg = &exp.config;
    let header = ContainerHeader {
        nu: cfg.kernel.nu,
        p: cfg.kernel.p,
        seed: cfg.sampling.seed,
        replicas: rows.len() as u64,
        levels: (0..exp.seq.len())
            .map(|n| LevelEntry { centers: exp.lattice.count(n) as u64, radius: exp.seq.radius(n) })
            .collect(),
    };
    let container = FieldContainer::new(header, layout.len(), rows.concat())?;
    Ok((layout, container))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectedPoint {
    pub replica: u64,
    pub cell: usize,
    pub center: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectSummary {
    pub mode: DetectMode,
    pub gamma: f64,
    pub threshold: f64,
    pub tol: f64,
    pub window: usize,
    pub level: usize,
    pub radii: (usize, usize),
    pub per_replica: Vec<usize>,
    pub points: Vec<DetectedPoint>,
    /// Box dimension of the pooled detections, at half the cell sides of
    /// levels 1..=level.
    pub dimension: Option<DimensionEstimate>,
}

impl DetectSummary {
    pub fn total(&self) -> usize {
        self.per_replica.iter().sum()
    }

    pub fn replicas_with_detections(&self) -> usize {
        self.per_replica.iter().filter(|&&c| c > 0).count()
    }
}

/// Finest-level sites carrying the last `window` radii.
pub fn run_detect(exp: &Experiment, mode: DetectMode) -> Result<DetectSummary> {
    let cfg = exp.thick()?;
    let level = exp.finest();
    let layout = exp.layout([level], PathSpan::Last(cfg.window))?;
    let sampler = exp.sampler(&layout)?;
    let per: Vec<Vec<usize>> = exp.map_replicas(&sampler, |_, v| {
        Ok(match mode {
            DetectMode::Limsup => detect_limsup(&layout, &exp.table, v, &cfg)?.detected,
            DetectMode::Sequential => detect_sequential(&layout, &exp.table, v, &cfg)?.detected,
            DetectMode::PerfectSurrogate => {
                // the scan reports a count; recover the cells with the
                // sequential rule over the same window
                let n = perfect_surrogate_scan(&layout, &exp.table, v, &cfg, cfg.window)?;
                let cells = detect_sequential(&layout, &exp.table, v, &cfg)?.detected;
                debug_assert_eq!(n, cells.len());
                cells
            }
        })
    })?;
    let lo = (level + 1).saturating_sub(cfg.window);
    let mut points = Vec::new();
    for (r, cells) in per.iter().enumerate() {
        for &c in cells {
            points.push(DetectedPoint { replica: r as u64, cell: c, center: layout.center(level, c).to_vec() });
        }
    }
    let dimension = if points.is_empty() || level < 2 {
        None
    } else {
        let flat: Vec<f64> = points.iter().flat_map(|p| p.center.iter().copied()).collect();
        let mut scales: Vec<f64> = (1..=level).map(|n| 0.5 * exp.lattice.level(n).cell_side()).collect();
        // capped levels repeat a cell side
        scales.dedup();
        box_dimension(&flat, exp.nu() as usize, &scales).ok()
    };
    Ok(DetectSummary {
        mode,
        gamma: cfg.gamma,
        threshold: cfg.threshold(),
        tol: cfg.tol,
        window: cfg.window,
        level,
        radii: (lo, level),
        per_replica: per.iter().map(Vec::len).collect(),
        points,
        dimension,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionRow {
    pub gamma: f64,
    pub estimate: Option<f64>,
    pub half_width: f64,
    pub replicas: usize,
    pub mean_counts: Vec<f64>,
}

/// Sites at levels 1..=finest with full paths; for each gamma the mean
/// number of exceeding cells per level is regressed on the log cell count
/// scale. One set of fields serves every gamma.
pub fn run_dimension(exp: &Experiment, gammas: &[f64]) -> Result<Vec<DimensionRow>> {
    let finest = exp.finest();
    if finest < 2 {
        return Err(GffError::Config("dimension needs at least three radii".into()));
    }
    let base = exp.thick()?;
    let cfgs: Vec<ThickConfig> = gammas
        .iter()
        .map(|&g| Ok(ThickConfig { gamma: g, gamma_prime: 0.95 * g, gamma_dprime: 0.9 * g, ..base }.validated()?))
        .collect::<Result<_>>()?;
    let layout = exp.layout(1..=finest, PathSpan::Full)?;
    let sampler = exp.sampler(&layout)?;
    // counts[replica][gamma][level]
    let counts: Vec<Vec<Vec<usize>>> = exp.map_replicas(&sampler, |_, v| {
        cfgs.iter()
            .map(|c| (1..=finest).map(|n| Ok(exceedance_cells(&layout, &exp.table, v, c, n)?.len())).collect())
            .collect()
    })?;
    // realized box scale: half a cell side
    let ln_scales: Vec<f64> = (1..=finest).map(|n| (0.5 * exp.lattice.level(n).cell_side()).ln()).collect();
    cfgs.iter()
        .enumerate()
        .map(|(g, c)| {
            let per: Vec<Vec<usize>> = counts.iter().map(|r| r[g].clone()).collect();
            let est = dimension_from_counts(&ln_scales, &per)?;
            Ok(DimensionRow {
                gamma: c.gamma,
                estimate: est.estimate,
                half_width: est.half_width,
                replicas: per.len(),
                mean_counts: est.counts,
            })
        })
        .collect()
}

trait Validated: Sized {
    fn validated(self) -> std::result::Result<Self, CoreError>;
}

impl Validated for ThickConfig {
    fn validated(self) -> std::result::Result<Self, CoreError> {
        self.validate().map(|_| self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRow {
    pub replica: u64,
    pub n: usize,
    pub mass: f64,
    pub energy: f64,
    pub energy_se: f64,
    pub cells: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSummary {
    pub rows: Vec<MeasureRow>,
    pub certificate: Certificate,
    pub mean_mass: f64,
    pub mass_se: f64,
}

/// Near-pair QMC samples per offset class in the energy evaluation.
pub const PAIR_SAMPLES: usize = 4096;

/// Level-n sites with full paths; the measure, its mass and its alpha-energy
/// per replica, and the capacity certificate over replicas.
pub fn run_measure(exp: &Experiment, n: usize) -> Result<MeasureSummary> {
    if n == 0 || n > exp.finest() {
        return Err(GffError::Config(format!("measure level must lie in 1..={}", exp.finest())));
    }
    let cfg = exp.thick()?;
    let m = &exp.config.measure;
    let layout = exp.layout([n], PathSpan::Full)?;
    let sampler = exp.sampler(&layout)?;
    let proto = EnergyEvaluator::new(exp.nu(), m.alpha, PAIR_SAMPLES)?;
    let seed = exp.config.sampling.seed;
    let dim = sampler.dim();
    // the near-pair cache holds deterministic values, so per-worker copies
    // give the same energies as a shared one
    let results: Vec<(MeasureRow, gff_core::measures::EnergyEstimate)> = (0..exp.config.sampling.replicas as u64)
        .into_par_iter()
        .map_init(
            || (proto.clone(), vec![0.0; dim], vec![0.0; dim]),
            |(ev, z, out), r| {
                sampler.sample_into(seed, r, z, out);
                let mu = build_measure(&layout, &exp.table, out, &cfg, n)?;
                let mass = total_mass(&mu);
                let e = ev.energy(&mu)?;
                let row = MeasureRow {
                    replica: r,
                    n,
                    mass,
                    energy: e.value,
                    energy_se: e.se,
                    cells: mu.len(),
                    pass: certificate_pass(mass, &e, m.c1, m.c2),
                };
                Ok((row, e))
            },
        )
        .collect::<Result<_>>()?;
    let records: Vec<_> = results.iter().map(|(r, e)| (r.mass, *e)).collect();
    let certificate = capacity_certificate(&records, m.alpha, m.c1, m.c2)?;
    let masses: Vec<f64> = results.iter().map(|(r, _)| r.mass).collect();
    let (mean_mass, mass_se) = gff_core::stats::mean_se(&masses);
    Ok(MeasureSummary { rows: results.into_iter().map(|(r, _)| r).collect(), certificate, mean_mass, mass_se })
}
