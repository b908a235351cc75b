//! Experiment configuration: a JSON file, overridden field by field by flags.

use std::path::{Path, PathBuf};

use hinfcalc::library::{load_generator, REFERENCE_IDS};
use hinfcalc::signals::DEFAULT_SAMPLES;
use hinfcalc::{FuncExpr, GeneratorMatrix, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_EPS_POINTS: usize = 24;
pub const DEFAULT_EPS_MIN: f64 = 1e-6;
pub const DEFAULT_EPS_MAX: f64 = 0.1;
pub const MAX_BLASCHKE_FACTORS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    #[default]
    None,
    Spectral,
    Quadrature,
}

impl std::str::FromStr for Oracle {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "none" => Ok(Oracle::None),
            "spectral" => Ok(Oracle::Spectral),
            "quadrature" => Ok(Oracle::Quadrature),
            other => Err(CliError::Invalid(format!(
                "unknown oracle `{other}` (expected none, spectral or quadrature)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Generator IDs or JSON matrix paths.
    pub generators: Vec<String>,
    /// Function IDs or expression sources.
    pub functions: Vec<String>,
    pub eps: Vec<f64>,
    pub eps_max: f64,
    /// Grid samples; the step then follows from the horizon or the decay rate.
    pub n_samples: Option<usize>,
    pub horizon: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub dump: Option<PathBuf>,
    pub oracle: Oracle,
    /// Search: Blaschke factors per candidate and number of candidates.
    pub factors: usize,
    pub iterations: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            generators: Vec::new(),
            functions: Vec::new(),
            eps: default_eps(),
            eps_max: DEFAULT_EPS_MAX,
            n_samples: None,
            horizon: None,
            seed: 0,
            out: None,
            dump: None,
            oracle: Oracle::None,
            factors: 8,
            iterations: 64,
        }
    }
}

/// `count` log-spaced points from `lo` to `hi`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..count)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
                .collect()
        }
    }
}

pub fn default_eps() -> Vec<f64> {
    log_spaced(DEFAULT_EPS_MIN, DEFAULT_EPS_MAX, DEFAULT_EPS_POINTS)
}

/// Parse a comma-separated eps list; an empty string is the empty list.
pub fn parse_eps_list(text: &str) -> Result<Vec<f64>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Invalid(format!("bad eps value `{v}`")))
        })
        .collect()
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.eps_max > 0.0 && self.eps_max.is_finite()) {
            return Err(CliError::Invalid(format!("eps_max must be positive, got {}", self.eps_max)));
        }
        if let Some(bad) = self.eps.iter().find(|&&e| !(e > 0.0 && e <= self.eps_max)) {
            return Err(CliError::Invalid(format!(
                "eps value {bad} outside (0, {}]",
                self.eps_max
            )));
        }
        if self.factors > MAX_BLASCHKE_FACTORS {
            return Err(CliError::Invalid(format!(
                "at most {MAX_BLASCHKE_FACTORS} Blaschke factors, got {}",
                self.factors
            )));
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::Invalid(format!("horizon must be positive, got {h}")));
            }
        }
        Ok(())
    }

    pub fn generators(&self) -> Result<Vec<GeneratorMatrix>, CliError> {
        self.generators
            .iter()
            .map(|id| load_generator(id).map_err(CliError::from))
            .collect()
    }

    /// `(id, function)` pairs; the reference set when none are configured.
    pub fn functions(&self) -> Result<Vec<(String, FuncExpr)>, CliError> {
        let ids: Vec<String> = if self.functions.is_empty() {
            REFERENCE_IDS.iter().map(|s| s.to_string()).collect()
        } else {
            self.functions.clone()
        };
        ids.into_iter()
            .map(|id| {
                let g = hinfcalc::library::builtin_function(&id)?;
                Ok((id, g))
            })
            .collect()
    }

    /// Grid for one generator: explicit horizon if given, else sized to its decay rate.
    pub fn grid_for(&self, a: &GeneratorMatrix) -> Result<TimeGrid, CliError> {
        let n = self.n_samples.unwrap_or(DEFAULT_SAMPLES);
        let grid = match self.horizon {
            Some(t) => TimeGrid::with_horizon(t, n)?,
            None => TimeGrid::for_abscissa(a.spectral_abscissa(), n)?,
        };
        Ok(grid)
    }
}

/// `(family, n)` columns for a generator: the label up to its first `:`.
pub fn family_of(a: &GeneratorMatrix) -> String {
    let label = a.label();
    match label.split_once(':') {
        Some((family, _)) => family.to_string(),
        None => Path::new(label)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| label.to_string()),
    }
}
