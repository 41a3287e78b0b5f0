//! Run configuration: one JSON file, validated before any computation.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mri_core::operators::{RadialGrid, Spacing, DEFAULT_K_MAX_HINT};
use mri_core::profiles::{make_keplerian, make_offset_power, make_powerlaw, make_tabulated, make_twoterm, FieldShape, RadialProfile};
use mri_core::thresholds::geometric_points;
use serde::{Deserialize, Serialize};

pub const DEFAULT_N: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileConfig,
    #[serde(default)]
    pub grid: GridConfig,
    pub task: TaskConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    /// ω² = gm/r³.
    Keplerian {
        #[serde(default = "one")]
        gm: f64,
        r1: f64,
        r2: f64,
        eps: f64,
        #[serde(default)]
        field: FieldConfig,
    },
    /// ω² = ω₀²(1 + β r^γ).
    Powerlaw {
        omega0: f64,
        beta: f64,
        gamma: f64,
        r1: f64,
        r2: f64,
        eps: f64,
        #[serde(default)]
        field: FieldConfig,
    },
    /// ω² = c1·r + c2/r.
    Twoterm {
        c1: f64,
        c2: f64,
        r1: f64,
        r2: f64,
        eps: f64,
        #[serde(default)]
        field: FieldConfig,
    },
    /// ω² = c0 + c1·r^γ.
    OffsetPower {
        c0: f64,
        c1: f64,
        gamma: f64,
        r1: f64,
        r2: f64,
        eps: f64,
        #[serde(default)]
        field: FieldConfig,
    },
    /// Samples [r, ω, b], interpolated.
    Tabulated { samples: Vec<[f64; 3]>, eps: f64 },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    #[default]
    Uniform,
    /// b = 1 + amp·exp(−((r − center)/width)²).
    Gaussian { amp: f64, center: f64, width: f64 },
}

impl ProfileConfig {
    pub fn eps(&self) -> f64 {
        match self {
            ProfileConfig::Keplerian { eps, .. }
            | ProfileConfig::Powerlaw { eps, .. }
            | ProfileConfig::Twoterm { eps, .. }
            | ProfileConfig::OffsetPower { eps, .. }
            | ProfileConfig::Tabulated { eps, .. } => *eps,
        }
    }

    pub fn build(&self) -> mri_core::Result<RadialProfile<f64>> {
        let (p, field) = match self {
            ProfileConfig::Keplerian { gm, r1, r2, eps, field } => (make_keplerian(*gm, *r1, *r2, *eps)?, field),
            ProfileConfig::Powerlaw { omega0, beta, gamma, r1, r2, eps, field } => (make_powerlaw(*omega0, *beta, *gamma, *r1, *r2, *eps)?, field),
            ProfileConfig::Twoterm { c1, c2, r1, r2, eps, field } => (make_twoterm(*c1, *c2, *r1, *r2, *eps)?, field),
            ProfileConfig::OffsetPower { c0, c1, gamma, r1, r2, eps, field } => (make_offset_power(*c0, *c1, *gamma, *r1, *r2, *eps)?, field),
            ProfileConfig::Tabulated { samples, eps } => {
                let s: Vec<(f64, f64, f64)> = samples.iter().map(|v| (v[0], v[1], v[2])).collect();
                return make_tabulated(&s, *eps);
            }
        };
        match field {
            FieldConfig::Uniform => Ok(p),
            FieldConfig::Gaussian { amp, center, width } => p.with_field(FieldShape::Gaussian { amp: *amp, center: *center, width: *width }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub spacing: SpacingConfig,
}

fn default_n() -> usize {
    DEFAULT_N
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: DEFAULT_N, spacing: SpacingConfig::Uniform }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingConfig {
    #[default]
    Uniform,
    Geometric,
}

impl GridConfig {
    pub fn build(&self, p: &RadialProfile<f64>, n: usize) -> mri_core::Result<RadialGrid<f64>> {
        let spacing = match self.spacing {
            SpacingConfig::Uniform => Spacing::Uniform,
            SpacingConfig::Geometric => Spacing::Geometric,
        };
        RadialGrid::new(p.r1, p.r2, n, spacing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskConfig {
    /// Sharp verdict plus the unstable mode count.
    Stability {
        #[serde(default = "default_k_max_hint")]
        k_max_hint: usize,
    },
    /// B₀², ε_min², ε_max² and the kernel perturbation sign.
    Thresholds {},
    /// Growth rates and mode profiles.
    Modes {
        #[serde(default = "default_ks")]
        k: Vec<usize>,
        #[serde(default = "yes")]
        profiles: bool,
    },
    /// Local dispersion roots on a (r0, k, kr) grid.
    Dispersion {
        /// Defaults to the annulus midpoint.
        #[serde(default)]
        r0: Vec<f64>,
        k: Vec<f64>,
        kr: Vec<f64>,
        /// When set, also tabulate local vs global growth at this k.
        #[serde(default)]
        global_k: Option<usize>,
    },
    /// Fixed-step RK4 run of the per-k linearized system.
    Simulate {
        #[serde(default = "one_k")]
        k: usize,
        #[serde(default)]
        system: SystemConfig,
        /// Defaults to 10/Λ when unstable, 200 otherwise.
        #[serde(default)]
        t_end: Option<f64>,
        /// Defaults to 0.01/Λ when unstable, 0.2/‖G‖ otherwise.
        #[serde(default)]
        dt: Option<f64>,
        #[serde(default)]
        init: InitConfig,
        #[serde(default)]
        seed: u64,
        #[serde(default = "one_k")]
        stride: usize,
    },
    /// Zero-field growth rates and the MHD comparison.
    Euler {
        #[serde(default = "default_euler_ks")]
        k: Vec<usize>,
        #[serde(default)]
        eps_list: Vec<f64>,
        #[serde(default = "one_k")]
        compare_k: usize,
    },
    /// Cartesian sweep over eps, k and n.
    Sweep {
        #[serde(default)]
        axes: Axes,
        /// Also compute the growth rate at each point.
        #[serde(default)]
        growth_rate: bool,
    },
}

fn default_k_max_hint() -> usize {
    DEFAULT_K_MAX_HINT
}

fn default_ks() -> Vec<usize> {
    vec![1]
}

fn default_euler_ks() -> Vec<usize> {
    vec![1, 2, 4, 8, 16, 32, 64]
}

fn one_k() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemConfig {
    #[default]
    Mhd,
    Euler,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitConfig {
    #[default]
    Smooth,
    Random,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axes {
    #[serde(default)]
    pub eps: Option<Axis<f64>>,
    #[serde(default)]
    pub k: Option<Axis<usize>>,
    #[serde(default)]
    pub n: Option<Axis<usize>>,
}

/// An explicit list, or `{"geometric": [lo, hi, count]}` for eps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis<T> {
    List(Vec<T>),
    Geometric { geometric: (f64, f64, usize) },
}

impl Axis<f64> {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::List(v) => v.clone(),
            Axis::Geometric { geometric: (lo, hi, count) } => geometric_points(*lo, *hi, *count),
        }
    }
}

impl Axis<usize> {
    pub fn values(&self) -> Result<Vec<usize>> {
        match self {
            Axis::List(v) => Ok(v.clone()),
            Axis::Geometric { .. } => bail!("geometric axes are only allowed for eps"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_dir(), formats: default_formats() }
    }
}

impl OutputConfig {
    pub fn csv(&self) -> bool {
        self.formats.contains(&Format::Csv)
    }

    pub fn json(&self) -> bool {
        self.formats.contains(&Format::Json)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl RunConfig {
    /// Checks constraints that the JSON schema alone does not express.
    pub fn validate(&self) -> Result<()> {
        if self.grid.n < 4 {
            bail!("grid.n: expected an integer >= 4, got {}", self.grid.n);
        }
        let eps = self.profile.eps();
        if !eps.is_finite() {
            bail!("profile.eps: expected a finite number");
        }
        match &self.task {
            TaskConfig::Modes { k, .. } if k.is_empty() || k.contains(&0) => bail!("task.k: expected a nonempty list of integers >= 1"),
            TaskConfig::Euler { k, .. } if k.is_empty() || k.contains(&0) => bail!("task.k: expected a nonempty list of integers >= 1"),
            TaskConfig::Dispersion { k, kr, .. } if k.is_empty() || kr.is_empty() => bail!("task.k and task.kr: expected nonempty lists of numbers"),
            TaskConfig::Simulate { k: 0, .. } => bail!("task.k: expected an integer >= 1"),
            TaskConfig::Sweep { axes, .. } => {
                if let Some(a) = &axes.k {
                    if a.values()?.contains(&0) {
                        bail!("task.axes.k: expected integers >= 1");
                    }
                }
                if let Some(a) = &axes.n {
                    if a.values()?.iter().any(|&n| n < 4) {
                        bail!("task.axes.n: expected integers >= 4");
                    }
                }
                if let Some(Axis::Geometric { geometric: (lo, hi, count) }) = &axes.eps {
                    if !(*lo > 0.0 && hi > lo && *count >= 2) {
                        bail!("task.axes.eps.geometric: expected [lo > 0, hi > lo, count >= 2]");
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn task_name(&self) -> &'static str {
        match self.task {
            TaskConfig::Stability { .. } => "stability",
            TaskConfig::Thresholds {} => "thresholds",
            TaskConfig::Modes { .. } => "modes",
            TaskConfig::Dispersion { .. } => "dispersion",
            TaskConfig::Simulate { .. } => "simulate",
            TaskConfig::Euler { .. } => "euler",
            TaskConfig::Sweep { .. } => "sweep",
        }
    }
}

/// Parses and validates a config string.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).context("invalid config")?;
    cfg.validate().context("invalid config")?;
    Ok(cfg)
}

/// Reads, parses and validates a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_config_str(&text)
}
