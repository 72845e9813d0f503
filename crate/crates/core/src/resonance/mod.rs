//! Average Euler characteristics, the resonance identity `Σ χ̂/î = 1/2`,
//! Morse-count tables and stability audits.

pub mod audit;
pub mod morse;
pub mod pipeline;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{IndexProfile, IterationEntry, MinimalPeriod};
use crate::scalar::Float;

pub use audit::{rho_bound, stability_audit, AuditOrbit, StabilityAudit};
pub use pipeline::{analyze_orbit, OrbitAnalysis};
pub use morse::{morse_counts, morse_series, MorseInput, MorseSeries, MorseTable, SLOPE_GRID};

/// Ekeland index `i(yᵐ) = i(y,m) − n` and nullity for `m = 1..=count`.
pub fn shifted_indices<T: Float>(profile: &IndexProfile<T>, count: usize) -> Vec<IterationEntry> {
    let n = profile.n as i64;
    (1..=count)
        .map(|m| IterationEntry { m, index: profile.index(m) - n, nullity: profile.nullity(m) })
        .collect()
}

/// `k[m−1][l]` = `k_l(yᵐ)` for `m = 1..=K`, `l = 0..=2n−2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalTypeNumbers {
    pub k: Vec<Vec<u32>>,
}

impl CriticalTypeNumbers {
    /// The pattern forced on non-degenerate iterates: `k₀(yᵐ) = 1` iff
    /// `i(yᵐ) − i(y)` is even.
    pub fn nondegenerate(entries: &[IterationEntry], n: usize) -> Result<Self> {
        let first = entries.first().ok_or_else(|| Error::Precondition("no iterates".into()))?;
        let mut k = Vec::with_capacity(entries.len());
        for e in entries {
            if e.nullity != 1 {
                return Err(Error::Precondition(format!("iterate {} is degenerate (ν = {})", e.m, e.nullity)));
            }
            let mut row = vec![0; 2 * n - 1];
            row[0] = u32::from((e.index - first.index).rem_euclid(2) == 0);
            k.push(row);
        }
        Ok(Self { k })
    }

    /// Checks the support, the 0/1 endpoint values and the mutual exclusion
    /// rules for each iterate, plus the forced pattern on non-degenerate ones.
    pub fn validate(&self, entries: &[IterationEntry], n: usize) -> Result<()> {
        let bad = |m: usize, what: String| Err(Error::CriticalType(format!("iterate {m}: {what}")));
        if self.k.len() > entries.len() {
            return Err(Error::Precondition(format!(
                "{} rows of critical type numbers but only {} iterates",
                self.k.len(),
                entries.len()
            )));
        }
        let i1 = entries.first().map(|e| e.index).unwrap_or(0);
        for (row, e) in self.k.iter().zip(entries) {
            let m = e.m;
            let nu = e.nullity;
            if row.len() != 2 * n - 1 {
                return bad(m, format!("expected {} entries, got {}", 2 * n - 1, row.len()));
            }
            if nu == 0 {
                return bad(m, "nullity 0 cannot occur on a closed characteristic".into());
            }
            if let Some(l) = (nu..row.len()).find(|&l| row[l] != 0) {
                return bad(m, format!("k_{l} = {} outside [0, ν−1] with ν = {nu}", row[l]));
            }
            let top = nu - 1;
            if row[0] > 1 || row[top] > 1 {
                return bad(m, "k_0 and k_{ν−1} take only the values 0 and 1".into());
            }
            let middle = 1..top.max(1);
            if row[0] == 1 && (1..=top).any(|l| row[l] != 0) {
                return bad(m, "k_0 = 1 forces k_l = 0 for 1 ≤ l ≤ ν−1".into());
            }
            if top > 0 && row[top] == 1 && (0..top).any(|l| row[l] != 0) {
                return bad(m, "k_{ν−1} = 1 forces k_l = 0 for l ≤ ν−2".into());
            }
            if middle.clone().any(|l| row[l] >= 1) && (row[0] != 0 || row[top] != 0) {
                return bad(m, "a middle k_l ≥ 1 forces k_0 = k_{ν−1} = 0".into());
            }
            if nu <= 3 && row[..nu].iter().filter(|&&v| v != 0).count() > 1 {
                return bad(m, "for ν ≤ 3 at most one k_l is non-zero".into());
            }
            if nu == 1 {
                let expect = u32::from((e.index - i1).rem_euclid(2) == 0);
                if row[0] != expect {
                    return bad(m, format!("non-degenerate iterate needs k_0 = {expect}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerData {
    /// `χ(yᵐ)` for `m = 1..=K`.
    pub chi: Vec<i64>,
    #[serde(with = "exact")]
    pub chi_hat: Ratio<i64>,
}

/// `χ(yᵐ) = Σ_l (−1)^{i(yᵐ)+l} k_l(yᵐ)` and `χ̂ = (1/K) Σ_{m≤K} χ(yᵐ)`.
pub fn euler_characteristic(
    entries: &[IterationEntry],
    k: &CriticalTypeNumbers,
    big_k: MinimalPeriod,
    n: usize,
) -> Result<EulerData> {
    let degenerate = entries.iter().any(|e| e.nullity != 1);
    let kk = match big_k.finite() {
        Some(v) => v as usize,
        None if !degenerate => 2,
        None => {
            return Err(Error::UnsupportedNormalForm(
                "K has an unbounded denominator and some iterate is degenerate".into(),
            ))
        }
    };
    if entries.len() < kk || k.k.len() < kk {
        return Err(Error::Depth { required: kk });
    }
    k.validate(&entries[..kk], n)?;
    let chi: Vec<i64> = (0..kk)
        .map(|m| {
            k.k[m]
                .iter()
                .enumerate()
                .map(|(l, &v)| if (entries[m].index + l as i64).rem_euclid(2) == 0 { v as i64 } else { -(v as i64) })
                .sum()
        })
        .collect();
    let chi_hat = Ratio::new(chi.iter().sum::<i64>(), kk as i64);
    Ok(EulerData { chi, chi_hat })
}

/// `χ̂` when every iterate is non-degenerate: `(−1)^{i(y)}`, halved when
/// `i(y²) − i(y)` is odd.
pub fn nondegenerate_chi(entries: &[IterationEntry]) -> Result<Ratio<i64>> {
    if entries.len() < 2 {
        return Err(Error::Depth { required: 2 });
    }
    if let Some(e) = entries.iter().find(|e| e.nullity != 1) {
        return Err(Error::Precondition(format!("iterate {} is degenerate (ν = {})", e.m, e.nullity)));
    }
    let sign = if entries[0].index.rem_euclid(2) == 0 { 1 } else { -1 };
    if (entries[1].index - entries[0].index).rem_euclid(2) == 0 {
        Ok(Ratio::from_integer(sign))
    } else {
        Ok(Ratio::new(sign, 2))
    }
}

pub mod exact {
    //! `Ratio<i64>` as `{num, den}`.
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Frac {
        num: i64,
        den: i64,
    }

    pub fn serialize<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
        Frac { num: *r.numer(), den: *r.denom() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<i64>, D::Error> {
        let f = Frac::deserialize(d)?;
        if f.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(f.num, f.den))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Ratio<i64>>, s: S) -> Result<S::Ok, S::Error> {
            r.map(|r| Frac { num: *r.numer(), den: *r.denom() }).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Ratio<i64>>, D::Error> {
            Ok(Option::<Frac>::deserialize(d)?.map(|f| Ratio::new(f.num, f.den.max(1))))
        }
    }
}

/// One orbit's inputs to the resonance sum.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceInput {
    pub id: usize,
    pub mean_index: f64,
    /// `None` for degenerate orbits without critical type numbers.
    pub chi_hat: Option<Ratio<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitContribution {
    pub id: usize,
    pub mean_index: f64,
    #[serde(with = "exact::option")]
    pub chi_hat: Option<Ratio<i64>>,
    pub contribution: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub orbits: Vec<OrbitContribution>,
    pub total: f64,
    pub residual: f64,
    /// True when some orbit was left out, so the identity is not tested.
    pub incomplete: bool,
}

/// Mean indices at or below this margin above 2 are rejected (n ≥ 2).
pub const MEAN_INDEX_FLOOR: f64 = 2.0;

/// `Σ χ̂/î` in orbit-id order and its distance to `1/2`. For `n = 1` the only
/// orbit is the circle with `î = 2`, which is accepted.
pub fn resonance_sum(inputs: &[ResonanceInput], n: usize) -> Result<ResonanceReport> {
    let mut sorted: Vec<&ResonanceInput> = inputs.iter().collect();
    sorted.sort_by_key(|o| o.id);
    let mut total = 0.0;
    let mut orbits = Vec::with_capacity(sorted.len());
    let mut incomplete = false;
    for o in sorted {
        let ok = if n == 1 { o.mean_index >= MEAN_INDEX_FLOOR - 1e-9 } else { o.mean_index > MEAN_INDEX_FLOOR };
        if !ok {
            return Err(Error::InvariantViolation(format!(
                "orbit {} has mean index {} not above 2",
                o.id, o.mean_index
            )));
        }
        match o.chi_hat {
            Some(chi) => {
                let c = *chi.numer() as f64 / *chi.denom() as f64 / o.mean_index;
                total += c;
                orbits.push(OrbitContribution {
                    id: o.id,
                    mean_index: o.mean_index,
                    chi_hat: Some(chi),
                    contribution: Some(c),
                    excluded: None,
                });
            }
            None => {
                incomplete = true;
                orbits.push(OrbitContribution {
                    id: o.id,
                    mean_index: o.mean_index,
                    chi_hat: None,
                    contribution: None,
                    excluded: Some("degenerate orbit without critical type numbers".into()),
                });
            }
        }
    }
    Ok(ResonanceReport { orbits, total, residual: (total - 0.5).abs(), incomplete })
}

impl ResonanceReport {
    /// Rows `(orbit, î, χ̂, contribution)`.
    pub fn csv_rows(&self) -> Vec<[String; 4]> {
        self.orbits
            .iter()
            .map(|o| {
                [
                    o.id.to_string(),
                    format!("{:.17e}", o.mean_index),
                    o.chi_hat.map_or_else(String::new, |c| c.to_string()),
                    o.contribution.map_or_else(String::new, |c| format!("{c:.17e}")),
                ]
            })
            .collect()
    }
}
