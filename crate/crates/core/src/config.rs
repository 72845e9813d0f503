//! Numerical thresholds shared across modules.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed defect of `MᵀJM = J` and `det M = 1`.
    pub tol_symp: f64,
    /// Distance to the unit circle below which an eigenvalue counts as on it.
    pub tol_eig: f64,
    /// Relative singular value cutoff for kernels.
    pub tol_rank: f64,
    /// Angle used for degenerate endpoints and one-sided limits.
    pub perturb_delta: f64,
    pub max_refine: u32,
    /// Denominator cap of the rational angle detector.
    pub q_max: u64,
    pub rational_tol: f64,
    /// Agreement required between the two mean index computations.
    pub mean_tol: f64,
    /// Eigenvalues closer than this are grouped into one cluster.
    pub cluster_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_symp: 1e-10,
            tol_eig: 1e-8,
            tol_rank: 1e-8,
            perturb_delta: 1e-4,
            max_refine: 60,
            q_max: 64,
            rational_tol: 1e-9,
            mean_tol: 1e-6,
            cluster_tol: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("tol_symp", self.tol_symp),
            ("tol_eig", self.tol_eig),
            ("tol_rank", self.tol_rank),
            ("perturb_delta", self.perturb_delta),
            ("rational_tol", self.rational_tol),
            ("mean_tol", self.mean_tol),
            ("cluster_tol", self.cluster_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerances.{name} must be positive, got {v}"));
            }
        }
        if self.max_refine == 0 {
            return Err("tolerances.max_refine must be positive".into());
        }
        if self.q_max == 0 {
            return Err("tolerances.q_max must be positive".into());
        }
        Ok(())
    }
}
