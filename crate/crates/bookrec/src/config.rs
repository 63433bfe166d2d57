//! Run configuration: a JSON file provides defaults, command-line flags
//! override it, and anything still unset falls back to built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::Context;
use bookrec_core::cluster::ClusterParams;
use serde::Deserialize;

use crate::CliError;

/// Artifact format for report-emitting subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Tsv,
    Json,
}

/// On-disk run configuration. Every field is optional; flags win on overlap.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub ratings_path: Option<PathBuf>,
    pub tags_path: Option<PathBuf>,
    pub ahp_config_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub test_fraction: Option<f64>,
    pub format: Option<ReportFormat>,
    pub alpha: Option<f64>,
    pub speed: Option<f64>,
    pub max_speed: Option<f64>,
    pub patch_side: Option<usize>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub iterations: Option<usize>,
    pub grid_width: Option<usize>,
    pub grid_height: Option<usize>,
    pub ant_count: Option<usize>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let parsed = serde_json::from_str(&text)
            .with_context(|| format!("invalid config file {}", path.display()))?;
        Ok(parsed)
    }
}

/// Values collected from command-line flags, pre-merge.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub ratings: Option<PathBuf>,
    pub tags: Option<PathBuf>,
    pub ahp_config: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub n_values: Option<Vec<usize>>,
    pub test_fraction: Option<f64>,
    pub format: Option<ReportFormat>,
    pub alpha: Option<f64>,
    pub speed: Option<f64>,
    pub max_speed: Option<f64>,
    pub patch_side: Option<usize>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub iterations: Option<usize>,
    pub grid_width: Option<usize>,
    pub grid_height: Option<usize>,
    pub ant_count: Option<usize>,
}

/// Clustering knobs that survived the merge; unset ones keep the defaults
/// scaled to the population size.
#[derive(Debug, Default, Clone)]
pub struct ClusterOverrides {
    pub alpha: Option<f64>,
    pub speed: Option<f64>,
    pub max_speed: Option<f64>,
    pub patch_side: Option<usize>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub iterations: Option<usize>,
    pub grid_width: Option<usize>,
    pub grid_height: Option<usize>,
    pub ant_count: Option<usize>,
}

/// Fully merged configuration every subcommand runs against.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub ratings_path: Option<PathBuf>,
    pub tags_path: Option<PathBuf>,
    pub ahp_config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub k: usize,
    pub n_values: Vec<usize>,
    pub test_fraction: f64,
    pub format: ReportFormat,
    pub cluster: ClusterOverrides,
}

impl Resolved {
    /// Merge precedence: flag, then config file, then default.
    pub fn merge(file: RunConfigFile, flags: Overrides) -> Result<Self, CliError> {
        let resolved = Resolved {
            ratings_path: flags.ratings.or(file.ratings_path),
            tags_path: flags.tags.or(file.tags_path),
            ahp_config_path: flags.ahp_config.or(file.ahp_config_path),
            output_dir: flags
                .output_dir
                .or(file.output_dir)
                .unwrap_or_else(|| PathBuf::from("out")),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            k: flags.k.or(file.k).unwrap_or(5),
            n_values: flags
                .n_values
                .or_else(|| file.n.map(|n| vec![n]))
                .unwrap_or_else(|| vec![10]),
            test_fraction: flags.test_fraction.or(file.test_fraction).unwrap_or(0.3),
            format: flags.format.or(file.format).unwrap_or(ReportFormat::Tsv),
            cluster: ClusterOverrides {
                alpha: flags.alpha.or(file.alpha),
                speed: flags.speed.or(file.speed),
                max_speed: flags.max_speed.or(file.max_speed),
                patch_side: flags.patch_side.or(file.patch_side),
                k1: flags.k1.or(file.k1),
                k2: flags.k2.or(file.k2),
                iterations: flags.iterations.or(file.iterations),
                grid_width: flags.grid_width.or(file.grid_width),
                grid_height: flags.grid_height.or(file.grid_height),
                ant_count: flags.ant_count.or(file.ant_count),
            },
        };
        resolved.validate()?;
        Ok(resolved)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.k == 0 {
            return Err(CliError::Usage("--k must be at least 1".into()));
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(CliError::Usage("--n values must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.test_fraction) {
            return Err(CliError::Usage(
                "--test-fraction must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// Single value of `--n` for subcommands that take exactly one.
    pub fn single_n(&self) -> Result<usize, CliError> {
        match self.n_values.as_slice() {
            [n] => Ok(*n),
            _ => Err(CliError::Usage(
                "--n takes a single value for this subcommand".into(),
            )),
        }
    }

    /// Population-scaled clustering parameters with the merged overrides
    /// applied on top.
    pub fn cluster_params(&self, user_count: usize) -> ClusterParams {
        let mut p = ClusterParams::for_users(user_count, self.seed);
        let c = &self.cluster;
        if let Some(v) = c.alpha {
            p.alpha = v;
        }
        if let Some(v) = c.speed {
            p.speed = v;
        }
        if let Some(v) = c.max_speed {
            p.max_speed = v;
        }
        if let Some(v) = c.patch_side {
            p.patch_side = v;
        }
        if let Some(v) = c.k1 {
            p.k1 = v;
        }
        if let Some(v) = c.k2 {
            p.k2 = v;
        }
        if let Some(v) = c.iterations {
            p.iterations = v;
        }
        if let Some(v) = c.grid_width {
            p.grid_width = v;
        }
        if let Some(v) = c.grid_height {
            p.grid_height = v;
        }
        if let Some(v) = c.ant_count {
            p.ant_count = v;
        }
        p
    }
}

/// Criterion tree for weight derivation: each internal node carries a
/// pairwise-comparison matrix over its children; leaves carry none.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AhpConfig {
    pub root: AhpNode,
    #[serde(default)]
    pub grades: Option<GradeSpec>,
    #[serde(default)]
    pub membership: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AhpNode {
    pub name: String,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub children: Vec<AhpNode>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradeSpec {
    pub labels: Vec<String>,
    pub scores: Vec<f64>,
}

impl AhpConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read criteria file {}", path.display()))?;
        let parsed = serde_json::from_str(&text)
            .with_context(|| format!("invalid criteria file {}", path.display()))?;
        Ok(parsed)
    }
}
