//! Run configuration file.

use std::path::{Path, PathBuf};

use closed_char::geometry::BodySpec;
use closed_char::resonance::SLOPE_GRID;
use closed_char::Tolerances;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Solvers {
    /// Closed-form circles; ellipsoids only.
    pub analytic: Option<bool>,
    pub shooting: Option<bool>,
    pub dual_action: bool,
}

impl Default for Solvers {
    fn default() -> Self {
        Self { analytic: None, shooting: None, dual_action: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub body: Option<BodySpec>,
    pub solvers: Solvers,
    pub tolerances: Tolerances,
    pub m_max: usize,
    pub morse_cutoffs: Vec<usize>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Extra shooting seeds, each a point in ℝ²ⁿ.
    pub seeds: Vec<Vec<f64>>,
    pub k_random: usize,
    pub modes: usize,
    pub samples: usize,
    /// Exponent of the homogeneous Hamiltonian used for linearization.
    pub alpha: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            body: None,
            solvers: Solvers::default(),
            tolerances: Tolerances::default(),
            m_max: 12,
            morse_cutoffs: SLOPE_GRID.to_vec(),
            out: None,
            seed: 0,
            seeds: Vec::new(),
            k_random: 32,
            modes: 64,
            samples: 256,
            alpha: 1.5,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.tolerances.validate().map_err(CliError::Input)?;
        if self.m_max < 2 {
            return Err(CliError::Input(format!("m_max must be at least 2, got {}", self.m_max)));
        }
        if self.modes < 8 {
            return Err(CliError::Input(format!("modes must be at least 8, got {}", self.modes)));
        }
        if self.samples < 8 {
            return Err(CliError::Input(format!("samples must be at least 8, got {}", self.samples)));
        }
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(CliError::Input(format!("alpha must lie in (1, 2), got {}", self.alpha)));
        }
        if self.morse_cutoffs.is_empty() {
            return Err(CliError::Input("morse_cutoffs must not be empty".into()));
        }
        if let Some(b) = &self.body {
            let dim = 2 * b.n();
            if let Some(s) = self.seeds.iter().find(|s| s.len() != dim) {
                return Err(CliError::Input(format!("seeds: point of length {} in ℝ^{dim}", s.len())));
            }
        }
        Ok(())
    }

    pub fn body(&self) -> Result<&BodySpec, CliError> {
        self.body.as_ref().ok_or_else(|| CliError::Input("config field `body` is missing".into()))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}
