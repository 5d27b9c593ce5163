//! Command-line surface.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gff_core::kernels::{Covariance, Kernel, KernelConfig, KernelValue, Method};
use gff_core::sampler::FieldLayout;
use gff_core::thickpoints::DetectMode;
use serde_json::json;

use crate::config::{ExperimentConfig, Preset, SequenceFlag};
use crate::drivers::{run_detect, run_dimension, run_measure, run_sample, thread_count, with_pool, Experiment};
use crate::error::{GffError, Result};
use crate::output::{fmt_f64, Csv, OutputDir};
use crate::verify::{self, Suite};

#[derive(Debug, Parser)]
#[command(name = "gff", version, about = "Circle-average Gaussian free field experiments")]
pub struct Cli {
    /// Worker threads (0: one per core). GFF_THREADS overrides this flag.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate covariance kernels.
    Kernels(KernelsArgs),
    /// Run an oracle suite and print a JSON verdict.
    Verify(VerifyArgs),
    /// Sample a lattice field and write it to a container.
    Sample(RunArgs),
    /// Flag thick points on sampled fields.
    Detect(DetectArgs),
    /// Estimate the dimension of thick-point sets.
    Dimension(DimensionArgs),
    /// Build the thick-point measures and their capacity certificate.
    Measure(MeasureArgs),
}

/// A single value `x` or an inclusive linear range `lo:hi:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [x] => Ok(Grid(vec![num(x)?])),
            [lo, hi, n] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                let n: usize = n.trim().parse().map_err(|_| format!("'{n}' is not a count"))?;
                if n == 0 || !(lo <= hi) || (n == 1 && lo != hi) {
                    return Err(format!("range {s} needs lo <= hi and count >= 1 (count 1 only when lo = hi)"));
                }
                if n == 1 {
                    return Ok(Grid(vec![lo]));
                }
                Ok(Grid((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()))
            }
            _ => Err(format!("'{s}' is neither a number nor lo:hi:count")),
        }
    }
}

#[derive(Debug, Args)]
pub struct KernelsArgs {
    #[arg(long)]
    pub nu: u32,
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    /// Radius, or lo:hi:count.
    #[arg(long)]
    pub t: Grid,
    /// Second radius, or lo:hi:count (default: same as --t).
    #[arg(long)]
    pub s: Option<Grid>,
    /// Center distance, or lo:hi:count.
    #[arg(long, default_value = "0")]
    pub dist: Grid,
    #[arg(long)]
    pub quad_rel_tol: Option<f64>,
    /// Subinterval budget of the adaptive quadrature.
    #[arg(long)]
    pub quad_max_subdiv: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub nu: Option<u32>,
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Flags shared by the sampling drivers; each overrides the config file.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub nu: Option<u32>,
    #[arg(long)]
    pub p: Option<u32>,
    /// paper | dyadic | geometric:rho,c | custom:file.json
    #[arg(long)]
    pub seq: Option<SequenceFlag>,
    /// Number of radii r_0..r_{N-1}.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Cells per axis cap; sets per_level_cap to grid^nu.
    #[arg(long, conflicts_with = "cap")]
    pub grid: Option<u64>,
    /// Cap on the number of cells of a level.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub max_points: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub window: Option<usize>,
    /// Output directory (default: print to stdout; sample writes to gff-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Limsup,
    Sequential,
    Perfect,
}

impl From<ModeArg> for DetectMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Limsup => DetectMode::Limsup,
            ModeArg::Sequential => DetectMode::Sequential,
            ModeArg::Perfect => DetectMode::PerfectSurrogate,
        }
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Limsup)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Thickness; repeat for several (default 0, 0.25, 0.5, or the config's).
    #[arg(long)]
    pub gamma: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Level of the measure (default: the finest).
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
}

/// Parses `args` (program name first), runs the command, and writes
/// results to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> std::result::Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Usage)?;
    let threads = thread_count(cli.threads)?;
    let text = with_pool(threads, || dispatch(cli.command))??;
    out.write_all(text.as_bytes()).map_err(|e| GffError::io(std::path::Path::new("<stdout>"), e))?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(clap::Error),
    #[error(transparent)]
    Run(#[from] GffError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(e) => e.exit_code() as u8,
            Self::Run(e) => e.exit_code(),
        }
    }
}

/// Runs a command and returns what it prints.
fn dispatch(cmd: Command) -> Result<String> {
    match cmd {
        Command::Kernels(a) => cmd_kernels(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Sample(a) => cmd_sample(&a),
        Command::Detect(a) => cmd_detect(&a),
        Command::Dimension(a) => cmd_dimension(&a),
        Command::Measure(a) => cmd_measure(&a),
    }
}

fn cmd_kernels(a: &KernelsArgs) -> Result<String> {
    let mut cfg = KernelConfig::new(a.nu, a.p)?;
    if let Some(tol) = a.quad_rel_tol {
        cfg = cfg.with_quad_rel_tol(tol)?;
    }
    if let Some(n) = a.quad_max_subdiv {
        cfg.quad_max_subdiv = n;
        cfg.validate()?;
    }
    let k = Kernel::new(cfg)?;
    let s = a.s.as_ref().unwrap_or(&a.t);
    let mut csv = Csv::new(&["nu", "p", "t", "s", "dist", "value", "method", "est_error", "renormalized"]);
    for &t in &a.t.0 {
        for &sv in &s.0 {
            for &d in &a.dist.0 {
                let (v, renorm) = kernel_value(&k, t, sv, d)?;
                csv.row([
                    a.nu.to_string(),
                    a.p.to_string(),
                    fmt_f64(t),
                    fmt_f64(sv),
                    fmt_f64(d),
                    fmt_f64(v.value),
                    v.method.as_str().into(),
                    fmt_f64(v.est_error),
                    renorm.to_string(),
                ]);
            }
        }
    }
    Ok(csv.into_string())
}

/// Renormalized covariance for p = 1; for p >= 2 the plain sphere-average
/// covariance (closed form when concentric, quadrature otherwise).
fn kernel_value(k: &Kernel, t: f64, s: f64, dist: f64) -> Result<(KernelValue, bool)> {
    if k.config().p == 1 {
        let v = if dist == 0.0 && t == s { KernelValue { value: k.variance(t)?, method: Method::ClosedConcentric, est_error: 0.0 } } else { k.cov(t, s, dist)? };
        return Ok((v, true));
    }
    if dist == 0.0 {
        let v = k.concentric_cov_p(t, s)?;
        return Ok((KernelValue { value: v, method: Method::ClosedConcentric, est_error: 0.0 }, false));
    }
    Ok((k.raw_cov_quadrature(t, s, dist)?, false))
}

fn cmd_verify(a: &VerifyArgs) -> Result<String> {
    let opt = verify::Options { nu: a.nu, cases: a.cases, tol: a.tol, seed: a.seed };
    let report = verify::run(a.suite, &opt)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match report.failures() {
        0 => Ok(text),
        n => Err(GffError::VerifyFailed { failed: n, report: text }),
    }
}

impl RunArgs {
    /// Config file (or the preset) with the flags merged over it.
    pub fn resolve(&self, preset: Preset) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::preset(preset),
        };
        if let Some(v) = self.nu {
            c.kernel.nu = v;
        }
        if let Some(v) = self.p {
            c.kernel.p = v;
        }
        match &self.seq {
            Some(flag) => c.sequence = flag.clone().into_section(self.levels.or(Some(c.sequence.levels)))?,
            None => {
                if let Some(l) = self.levels {
                    c.sequence.levels = l;
                }
            }
        }
        if let Some(g) = self.grid {
            let cap = g
                .checked_pow(c.kernel.nu)
                .ok_or_else(|| GffError::Config(format!("grid {g} overflows the cell count")))?;
            c.lattice.per_level_cap = cap;
        }
        if let Some(v) = self.cap {
            c.lattice.per_level_cap = v;
        }
        if let Some(v) = self.seed {
            c.sampling.seed = v;
        }
        if let Some(v) = self.replicas {
            c.sampling.replicas = v;
        }
        if let Some(v) = self.max_points {
            c.sampling.max_points = v;
        }
        if let Some(v) = self.tol {
            c.thick.tol = v;
        }
        if let Some(v) = self.window {
            c.thick.window = v;
        }
        if let Some(d) = &self.out {
            c.output.dir = Some(d.to_string_lossy().into_owned());
        }
        c.validate()?;
        Ok(c)
    }
}

fn sequence_json(exp: &Experiment) -> serde_json::Value {
    let s = &exp.seq;
    json!({
        "kind": exp.config.sequence.kind.to_string(),
        "params": exp.config.sequence.params,
        "radii": s.radii(),
        "ln_radii": s.ln_radii(),
        "requested_levels": s.requested_levels,
        "truncated": s.truncated(),
    })
}

fn lattice_json(exp: &Experiment) -> serde_json::Value {
    let l = &exp.lattice;
    json!({
        "nu": l.nu,
        "per_level_cap": l.per_level_cap,
        "levels": l.levels.iter().map(|v| json!({
            "n": v.n,
            "radius": v.radius,
            "per_axis": v.per_axis,
            "cells": v.count(l.nu),
            "cell_side": v.cell_side(),
            "ideal_ln_count": v.ideal_ln_count,
            "capped": v.capped,
        })).collect::<Vec<_>>(),
    })
}

fn layout_json(layout: &FieldLayout) -> serde_json::Value {
    json!({
        "span": match layout.span {
            gff_core::sampler::PathSpan::Full => "full".to_string(),
            gff_core::sampler::PathSpan::Last(k) => format!("last:{k}"),
        },
        "row_len": layout.len(),
        "blocks": layout.blocks().iter().map(|b| json!({
            "level": b.level,
            "first_radius": b.first_radius,
            "width": b.width,
            "cells": b.cells,
            "offset": b.offset,
        })).collect::<Vec<_>>(),
        "column": "offset + cell * width + (radius - first_radius); cells enumerate centers with axis 0 slowest",
    })
}

const RNG_NOTE: &str =
    "replica r draws standard normals from ChaCha20 seeded by seed_from_u64(seed) on stream r, then multiplies by the Cholesky factor of the correlation matrix";

fn cmd_sample(a: &RunArgs) -> Result<String> {
    let cfg = a.resolve(Preset::Sample)?;
    let exp = Experiment::new(cfg)?;
    let (layout, container) = run_sample(&exp)?;
    let dir = exp.config.output.dir.clone().unwrap_or_else(|| "gff-out".into());
    let mut od = OutputDir::create(&dir, "sample", &exp.config)?;
    od.write("sample", "field.gffs", &container.to_bytes())?;
    let side = json!({
        "config_hash": exp.config.hash(),
        "sequence": sequence_json(&exp),
        "lattice": lattice_json(&exp),
        "layout": layout_json(&layout),
        "replicas": container.header.replicas,
        "rng": RNG_NOTE,
    });
    od.write("sample", "field.json", (serde_json::to_string_pretty(&side).expect("json") + "\n").as_bytes())?;
    od.finish()?;
    let mut csv = Csv::new(&["level", "radius", "centers", "per_axis", "capped"]);
    for l in &exp.lattice.levels {
        csv.row([l.n.to_string(), fmt_f64(l.radius), l.count(exp.nu()).to_string(), l.per_axis.to_string(), l.capped.to_string()]);
    }
    Ok(csv.into_string())
}

/// Writes to the output directory when one is configured, else to `out`.
fn deliver(exp: &Experiment, command: &str, file: &str, text: String) -> Result<String> {
    match &exp.config.output.dir {
        Some(dir) => {
            let mut od = OutputDir::create(dir, command, &exp.config)?;
            od.write(command, file, text.as_bytes())?;
            od.finish()?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn cmd_detect(a: &DetectArgs) -> Result<String> {
    let mut cfg = a.run.resolve(Preset::Detect)?;
    if let Some(g) = a.gamma {
        cfg.thick.gamma = g;
        cfg.validate()?;
    }
    let exp = Experiment::new(cfg)?;
    let s = run_detect(&exp, a.mode.into())?;
    let dim = s.dimension.as_ref().map(|d| json!({"estimate": d.estimate, "half_width": d.half_width}));
    let doc = json!({
        "mode": s.mode.as_str(),
        "gamma": s.gamma,
        "threshold": s.threshold,
        "tol": s.tol,
        "window": s.window,
        "level": s.level,
        "radii": [s.radii.0, s.radii.1],
        "seed": exp.config.sampling.seed,
        "replicas": s.per_replica.len(),
        "cells_per_replica": exp.lattice.count(s.level),
        "total_flagged": s.total(),
        "replicas_with_detections": s.replicas_with_detections(),
        "per_replica": s.per_replica,
        "detected": s.points.iter().map(|p| json!({"replica": p.replica, "cell": p.cell, "center": p.center})).collect::<Vec<_>>(),
        "dimension": dim,
        "note": "finite-level surrogate: the limit in r is replaced by the window of finest radii",
    });
    let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
    deliver(&exp, "detect", "detect.json", text)
}

pub const DEFAULT_DIMENSION_GAMMAS: [f64; 3] = [0.0, 0.25, 0.5];

fn cmd_dimension(a: &DimensionArgs) -> Result<String> {
    let mut cfg = a.run.resolve(Preset::Dimension)?;
    let gammas: Vec<f64> = match (a.gamma.is_empty(), a.run.config.is_some()) {
        (false, _) => a.gamma.clone(),
        (true, true) => vec![cfg.thick.gamma],
        (true, false) => DEFAULT_DIMENSION_GAMMAS.to_vec(),
    };
    cfg.thick.gamma = gammas[0];
    cfg.validate()?;
    let exp = Experiment::new(cfg)?;
    let rows = run_dimension(&exp, &gammas)?;
    let mut csv = Csv::new(&["gamma", "estimate", "ci", "replicas"]);
    for r in &rows {
        csv.row([fmt_f64(r.gamma), fmt_f64(r.estimate.unwrap_or(f64::NAN)), fmt_f64(r.half_width), r.replicas.to_string()]);
    }
    deliver(&exp, "dimension", "dimension.csv", csv.into_string())
}

fn cmd_measure(a: &MeasureArgs) -> Result<String> {
    let mut cfg = a.run.resolve(Preset::Measure)?;
    if let Some(g) = a.gamma {
        cfg.thick.gamma = g;
    }
    if let Some(v) = a.alpha {
        cfg.measure.alpha = v;
    }
    if let Some(v) = a.c1 {
        cfg.measure.c1 = v;
    }
    if let Some(v) = a.c2 {
        cfg.measure.c2 = v;
    }
    cfg.validate()?;
    let exp = Experiment::new(cfg)?;
    let n = a.level.unwrap_or(exp.finest());
    let s = run_measure(&exp, n)?;
    let mut csv = Csv::new(&["replica", "n", "mass", "I_alpha", "pass_certificate"]);
    for r in &s.rows {
        csv.row([r.replica.to_string(), r.n.to_string(), fmt_f64(r.mass), fmt_f64(r.energy), r.pass.to_string()]);
    }
    let c = &s.certificate;
    eprintln!(
        "mean mass {} (se {}), certificate alpha={} c1={} c2={}: {}/{} passed, {} with zero mass",
        s.mean_mass, s.mass_se, c.alpha, c.c1, c.c2, c.passed, c.replicas, c.zero_mass
    );
    deliver(&exp, "measure", "measure.csv", csv.into_string())
}
