//! Orbit → monodromy → index profile → χ̂, as used by the resonance checks.

use num_rational::Ratio;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::floquet::{linearize, MonodromyData};
use crate::geometry::{ConvexBody, HamiltonianModel};
use crate::index::{iteration_profile, IndexProfile, IterationEntry};
use crate::orbit::ClosedCharacteristic;
use crate::resonance::{euler_characteristic, nondegenerate_chi, shifted_indices, CriticalTypeNumbers, ResonanceInput};
use crate::scalar::{lit, Float};

#[derive(Debug, Clone)]
pub struct OrbitAnalysis<T: Float> {
    pub id: usize,
    pub orbit: ClosedCharacteristic<T>,
    pub monodromy: MonodromyData<T>,
    pub profile: IndexProfile<T>,
    /// Ekeland indices for `m = 1..=max(m_max, K)`.
    pub entries: Vec<IterationEntry>,
    pub critical: Option<CriticalTypeNumbers>,
    pub chi_hat: Option<Ratio<i64>>,
}

impl<T: Float> OrbitAnalysis<T> {
    pub fn degenerate(&self) -> bool {
        self.entries.iter().any(|e| e.nullity != 1)
    }

    pub fn resonance_input(&self) -> ResonanceInput {
        ResonanceInput { id: self.id, mean_index: self.profile.mean_index.to_f64_lossy(), chi_hat: self.chi_hat }
    }
}

/// Linearizes `j^α` along the orbit, tabulates indices to `m_max` and
/// computes `χ̂`: from the non-degenerate pattern when every iterate up to
/// `K` has nullity 1 (both routes, which must agree), else from `supplied`
/// critical type numbers, else `None`.
pub fn analyze_orbit<T: Float>(
    id: usize,
    body: &ConvexBody<T>,
    alpha: f64,
    orbit: &ClosedCharacteristic<T>,
    samples: usize,
    m_max: usize,
    tol: &Tolerances,
    supplied: Option<CriticalTypeNumbers>,
) -> Result<OrbitAnalysis<T>> {
    let hm = HamiltonianModel::homogeneous(body.clone(), lit(alpha))?;
    let monodromy = linearize(&hm, orbit, samples, tol)?;
    let profile = iteration_profile(&monodromy.path, m_max.max(2), tol)?;
    let n = profile.n;
    let depth = profile.k.finite().map_or(2, |k| k as usize).max(m_max).max(2);
    let entries = shifted_indices(&profile, depth);
    let kk = profile.k.finite().map_or(2, |k| k as usize);
    let nondegenerate = entries.iter().take(kk.max(2)).all(|e| e.nullity == 1);
    let (critical, chi_hat) = if nondegenerate {
        let k = CriticalTypeNumbers::nondegenerate(&entries[..kk.min(entries.len())], n)?;
        let a = nondegenerate_chi(&entries)?;
        let b = euler_characteristic(&entries, &k, profile.k, n)?.chi_hat;
        if a != b {
            return Err(Error::Consistency {
                a: *a.numer() as f64 / *a.denom() as f64,
                b: *b.numer() as f64 / *b.denom() as f64,
            });
        }
        (Some(k), Some(a))
    } else if let Some(k) = supplied {
        let chi = euler_characteristic(&entries, &k, profile.k, n)?.chi_hat;
        (Some(k), Some(chi))
    } else {
        (None, None)
    };
    Ok(OrbitAnalysis { id, orbit: orbit.clone(), monodromy, profile, entries, critical, chi_hat })
}
