//! Experiment configuration: a versioned JSON document that flags merge over.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use gff_core::kernels::KernelConfig;
use gff_core::sampler::{custom_sequence, make_sequence, ScaleSequence, SequenceKind, DEFAULT_UNDERFLOW_FLOOR};
use gff_core::thickpoints::ThickConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{GffError, Result};

pub const CONFIG_VERSION: u32 = 1;

/// Accepted entries of `output.formats`. Each command writes its own file
/// type; the list is recorded with the run.
pub const FORMATS: [&str; 3] = ["csv", "json", "gffs"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub config_version: u32,
    pub kernel: KernelSection,
    pub sequence: SequenceSection,
    pub lattice: LatticeSection,
    pub sampling: SamplingSection,
    pub thick: ThickSection,
    pub measure: MeasureSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub nu: u32,
    pub p: u32,
    pub quad_rel_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKindName {
    /// r_n = 2^(1 - 2^(n^2))
    Paper,
    /// r_0 = 1, r_n = rho^(c^n); params [rho, c]
    Geometric,
    /// r_n = 2^-n
    Dyadic,
    /// radii listed in params
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSection {
    pub kind: SequenceKindName,
    #[serde(default)]
    pub params: Vec<f64>,
    /// Number of radii r_0..r_{N-1}.
    #[serde(rename = "N")]
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    /// Largest number of cells on any level.
    pub per_level_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub seed: u64,
    pub replicas: usize,
    pub max_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThickSection {
    pub gamma: f64,
    pub tol: f64,
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSection {
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub formats: Vec<String>,
}

/// Which driver a default configuration is for. The drivers differ in the
/// sequence they are tuned to by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Sample,
    Detect,
    Dimension,
    Measure,
}

impl ExperimentConfig {
    pub fn preset(p: Preset) -> Self {
        let (sequence, cap, replicas) = match p {
            Preset::Sample | Preset::Detect => (
                SequenceSection { kind: SequenceKindName::Geometric, params: vec![0.5, 1.5], levels: 7 },
                512,
                100,
            ),
            Preset::Dimension => (SequenceSection { kind: SequenceKindName::Dyadic, params: vec![], levels: 4 }, 4096, 20),
            Preset::Measure => (SequenceSection { kind: SequenceKindName::Dyadic, params: vec![], levels: 4 }, 4096, 200),
        };
        Self {
            config_version: CONFIG_VERSION,
            kernel: KernelSection { nu: 3, p: 1, quad_rel_tol: 1e-8 },
            sequence,
            lattice: LatticeSection { per_level_cap: cap },
            sampling: SamplingSection { seed: 42, replicas, max_points: gff_core::sampler::DEFAULT_MAX_POINTS },
            thick: ThickSection { gamma: 0.5, tol: 0.05, window: 3 },
            measure: MeasureSection { alpha: 1.2, c1: 4.0, c2: 50.0 },
            output: OutputSection { dir: None, formats: vec!["csv".into()] },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| GffError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| GffError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form with `output.dir` cleared, so the
    /// same experiment written to two places hashes alike. Field order is
    /// fixed by the struct.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = None;
        let compact = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&compact))
    }

    pub fn validate(&self) -> Result<()> {
        if self.config_version != CONFIG_VERSION {
            return Err(GffError::Config(format!(
                "config_version {} is not supported (expected {CONFIG_VERSION})",
                self.config_version
            )));
        }
        self.kernel_config()?;
        self.thick_config()?;
        self.sequence.validate()?;
        if self.lattice.per_level_cap == 0 {
            return Err(GffError::Config("per_level_cap must be positive".into()));
        }
        if self.sampling.replicas == 0 {
            return Err(GffError::Config("replicas must be positive".into()));
        }
        if let Some(f) = self.output.formats.iter().find(|f| !FORMATS.contains(&f.as_str())) {
            return Err(GffError::Config(format!("unknown output format '{f}' (known: {})", FORMATS.join(", "))));
        }
        let m = &self.measure;
        if !(m.alpha > 0.0) || !(m.c1 > 1.0) || !(m.c2 > 0.0) {
            return Err(GffError::Config("measure needs alpha > 0, c1 > 1, c2 > 0".into()));
        }
        Ok(())
    }

    pub fn kernel_config(&self) -> Result<KernelConfig> {
        Ok(KernelConfig::new(self.kernel.nu, self.kernel.p)?.with_quad_rel_tol(self.kernel.quad_rel_tol)?)
    }

    pub fn thick_config(&self) -> Result<ThickConfig> {
        let t = &self.thick;
        Ok(ThickConfig::new(self.kernel.nu, t.gamma)?.with_tol(t.tol)?.with_window(t.window)?)
    }

    pub fn scale_sequence(&self) -> Result<ScaleSequence> {
        self.sequence.build()
    }
}

impl SequenceSection {
    pub fn validate(&self) -> Result<()> {
        let want = match self.kind {
            SequenceKindName::Paper | SequenceKindName::Dyadic => Some(0),
            SequenceKindName::Geometric => Some(2),
            SequenceKindName::Custom => None,
        };
        if let Some(k) = want {
            if self.params.len() != k {
                return Err(GffError::Config(format!("sequence kind {} takes {k} parameters", self.kind)));
            }
        }
        if self.kind == SequenceKindName::Custom && self.params.len() != self.levels {
            return Err(GffError::Config("custom sequence: N must equal the number of radii".into()));
        }
        if self.levels < 2 {
            return Err(GffError::Config("a sequence needs N >= 2".into()));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<ScaleSequence> {
        self.validate()?;
        let floor = DEFAULT_UNDERFLOW_FLOOR;
        let seq = match self.kind {
            SequenceKindName::Paper => make_sequence(SequenceKind::PaperDoubleExp, self.levels, floor)?,
            SequenceKindName::Geometric => make_sequence(
                SequenceKind::GeometricPower { rho: self.params[0], c: self.params[1] },
                self.levels,
                floor,
            )?,
            SequenceKindName::Dyadic => {
                let radii: Vec<f64> = (0..self.levels).map(|n| (-(n as f64)).exp2()).collect();
                custom_sequence(&radii, floor)?
            }
            SequenceKindName::Custom => custom_sequence(&self.params, floor)?,
        };
        Ok(seq)
    }
}

impl fmt::Display for SequenceKindName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Paper => "paper",
            Self::Geometric => "geometric",
            Self::Dyadic => "dyadic",
            Self::Custom => "custom",
        })
    }
}

/// A sequence flag: `paper`, `dyadic`, `geometric:rho,c` or `custom:file.json`
/// (a JSON array of radii, or an object with a `radii` array).
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceFlag {
    Paper,
    Dyadic,
    Geometric { rho: f64, c: f64 },
    CustomFile(String),
}

impl FromStr for SequenceFlag {
    type Err = GffError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || GffError::Config(format!("bad sequence '{s}': expected paper, dyadic, geometric:rho,c or custom:file.json"));
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        match (head, tail) {
            ("paper", None) => Ok(Self::Paper),
            ("dyadic", None) => Ok(Self::Dyadic),
            ("geometric", Some(args)) => {
                let (rho, c) = args.split_once(',').ok_or_else(bad)?;
                let rho: f64 = rho.trim().parse().map_err(|_| bad())?;
                let c: f64 = c.trim().parse().map_err(|_| bad())?;
                Ok(Self::Geometric { rho, c })
            }
            ("custom", Some(path)) if !path.is_empty() => Ok(Self::CustomFile(path.to_string())),
            _ => Err(bad()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RadiiFile {
    Bare(Vec<f64>),
    Object { radii: Vec<f64> },
}

impl SequenceFlag {
    /// Resolves the flag into a config section. Custom radii are read and
    /// inlined so the config alone reproduces the run.
    pub fn into_section(self, levels: Option<usize>) -> Result<SequenceSection> {
        let section = match self {
            Self::Paper => SequenceSection { kind: SequenceKindName::Paper, params: vec![], levels: levels.unwrap_or(4) },
            Self::Dyadic => SequenceSection { kind: SequenceKindName::Dyadic, params: vec![], levels: levels.unwrap_or(4) },
            Self::Geometric { rho, c } => {
                SequenceSection { kind: SequenceKindName::Geometric, params: vec![rho, c], levels: levels.unwrap_or(4) }
            }
            Self::CustomFile(path) => {
                let p = Path::new(&path);
                let text = std::fs::read_to_string(p).map_err(|e| GffError::io(p, e))?;
                let radii = match serde_json::from_str::<RadiiFile>(&text).map_err(|e| GffError::Config(format!("{path}: {e}")))? {
                    RadiiFile::Bare(r) | RadiiFile::Object { radii: r } => r,
                };
                if let Some(l) = levels {
                    if l != radii.len() {
                        return Err(GffError::Config(format!("{path} lists {} radii but --levels is {l}", radii.len())));
                    }
                }
                SequenceSection { kind: SequenceKindName::Custom, levels: radii.len(), params: radii }
            }
        };
        section.validate()?;
        Ok(section)
    }
}
