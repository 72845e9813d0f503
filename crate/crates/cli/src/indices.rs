//! `indices`: linearize each orbit and tabulate its iteration indices.

use std::path::Path;

use closed_char::floquet::{linearize, tangent_checks, Classification, MonodromyJson, TangentReport};
use closed_char::geometry::{build_phi, BodySpec, ConvexBody, HamiltonianModel};
use closed_char::index::{IterationEntry, MinimalPeriod};
use closed_char::orbit::{ClosedCharacteristic, OrbitSource};
use closed_char::resonance::{analyze_orbit, exact, CriticalTypeNumbers, OrbitAnalysis};
use closed_char::Tolerances;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::orbits::OrbitsFile;
use crate::output::{read_json, write_json};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitIndices {
    pub id: usize,
    pub tau: f64,
    pub source: OrbitSource,
    pub classification: Classification,
    pub monodromy: MonodromyJson,
    /// `i(y,1)`, `ν(y,1)` and `S⁺(1)` of the linearized flow.
    pub i1: i64,
    pub nu1: usize,
    pub s_plus_at_one: i64,
    pub mean_index: f64,
    pub mean_index_check: Option<f64>,
    pub k: MinimalPeriod,
    /// `i(y,m)`, `ν(y,m)` for `m = 1..=m_max`.
    pub table: Vec<IterationEntry>,
    /// Ekeland indices `i(yᵐ) = i(y,m) − n`, deep enough for the Morse cutoffs.
    pub ekeland: Vec<IterationEntry>,
    pub critical: Option<CriticalTypeNumbers>,
    #[serde(with = "exact::option")]
    pub chi_hat: Option<Ratio<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicesFile {
    pub n: usize,
    pub body: BodySpec,
    pub complete: bool,
    pub alpha: f64,
    pub morse_cutoffs: Vec<usize>,
    pub orbits: Vec<OrbitIndices>,
    pub warnings: Vec<String>,
}

/// Ekeland depth covering `i(yᵐ) ≤ cutoff + 1` via `|i(y,m) − mî| ≤ 2n`.
fn ekeland_depth(mean: f64, n: usize, cutoff: usize, m_max: usize, k: MinimalPeriod) -> usize {
    let need = if mean > 1.0 { ((cutoff as f64 + 1.0 + 2.0 * n as f64) / mean).floor() as usize + 1 } else { 0 };
    let kk = k.finite().map_or(2, |v| v as usize);
    need.max(m_max).max(kk)
}

fn tangent(
    body: &ConvexBody<f64>,
    orbit: &ClosedCharacteristic<f64>,
    a: f64,
    vartheta: f64,
    alpha: f64,
    samples: usize,
    tol: &Tolerances,
) -> closed_char::Result<TangentReport> {
    let phi = build_phi(vartheta, alpha, false)?;
    let hm = HamiltonianModel::scaled(body.clone(), a, phi)?;
    let md = linearize(&hm, orbit, samples, tol)?;
    tangent_checks(&md, &hm, orbit.tau)
}

fn record(a: &OrbitAnalysis<f64>, n: usize, depth: usize, tangent: Option<TangentReport>) -> OrbitIndices {
    let p = &a.profile;
    let ekeland = (1..=depth)
        .map(|m| IterationEntry { m, index: p.index(m) - n as i64, nullity: p.nullity(m) })
        .collect();
    OrbitIndices {
        id: a.id,
        tau: a.orbit.tau,
        source: a.orbit.source,
        classification: a.monodromy.classification,
        monodromy: MonodromyJson::new(&a.monodromy, tangent),
        i1: p.i1,
        nu1: p.nu1,
        s_plus_at_one: p.function.points[0].s_plus,
        mean_index: p.mean_index,
        mean_index_check: p.mean_index_check,
        k: p.k,
        table: p.table.clone(),
        ekeland,
        critical: a.critical.clone(),
        chi_hat: a.chi_hat,
    }
}

pub fn run(cfg: &RunConfig, orbits: &OrbitsFile) -> Result<IndicesFile, CliError> {
    let body: ConvexBody<f64> = orbits.body.build().map_err(|e| CliError::Input(format!("body: {e}")))?;
    let n = body.n();
    let list = orbits
        .orbits
        .iter()
        .map(|o| o.to_orbit(&body))
        .collect::<closed_char::Result<Vec<_>>>()
        .map_err(|e| CliError::Input(format!("orbits: {e}")))?;
    if list.is_empty() {
        return Err(CliError::Input("orbit file lists no orbits".into()));
    }
    let tmax = list.iter().map(|o| o.tau).fold(0.0, f64::max);
    let tmin = list.iter().map(|o| o.tau).fold(f64::INFINITY, f64::min);
    let a = 3.0 * tmax;
    let vartheta = 0.9 * tmin / a;
    let cutoff = cfg.morse_cutoffs.iter().copied().max().unwrap_or(0);
    let tol = cfg.tolerances;
    let results: Vec<_> = list
        .par_iter()
        .enumerate()
        .map(|(id, orbit)| {
            let analysis = analyze_orbit(id, &body, cfg.alpha, orbit, cfg.samples, cfg.m_max, &tol, None)?;
            let t = tangent(&body, orbit, a, vartheta, cfg.alpha, cfg.samples, &tol);
            Ok::<_, closed_char::Error>((analysis, t))
        })
        .collect();
    let mut out = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    for r in results {
        let (analysis, t) = r?;
        let depth = ekeland_depth(analysis.profile.mean_index, n, cutoff, cfg.m_max, analysis.profile.k);
        let t = match t {
            Ok(t) => Some(t),
            Err(e) => {
                warnings.push(format!("orbit {}: tangent checks skipped: {e}", analysis.id));
                None
            }
        };
        if let Err(e) = analysis.profile.check_mean_bound() {
            return Err(e.into());
        }
        out.push(record(&analysis, n, depth, t));
    }
    Ok(IndicesFile {
        n,
        body: orbits.body.clone(),
        complete: orbits.complete,
        alpha: cfg.alpha,
        morse_cutoffs: cfg.morse_cutoffs.clone(),
        orbits: out,
        warnings,
    })
}

pub fn summary(file: &IndicesFile) -> String {
    let mut s = String::new();
    for o in &file.orbits {
        let chi = o.chi_hat.map_or_else(|| "n/a".to_string(), |c| c.to_string());
        s += &format!(
            "  [{}] {} i1 = {} nu1 = {} mean = {:.12} chi_hat = {chi}\n",
            o.id, o.classification, o.i1, o.nu1, o.mean_index
        );
    }
    for w in &file.warnings {
        s += &format!("  warning: {w}\n");
    }
    s
}

pub fn cmd(cfg: &RunConfig, orbits_path: &Path) -> Result<(), CliError> {
    let orbits: OrbitsFile = read_json(orbits_path)?;
    let file = run(cfg, &orbits)?;
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    write_json(&out.join("indices.json"), &file)?;
    print!("{}", summary(&file));
    Ok(())
}
