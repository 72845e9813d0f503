//! `orbits`: find, deduplicate and persist closed characteristics.

use closed_char::geometry::{build_phi, sampling::directions, BodySpec, ConvexBody, HamiltonianModel};
use closed_char::orbit::{
    dual_action, ellipsoid_orbits, group_orbits, monotonicity_audit, shoot, ClosedCharacteristic, DualActionOptions,
    FourierLoop, OrbitJson, OrbitSource, ShootOptions,
};
use closed_char::orbit::dual_action::MonotonicityAudit;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::output::write_json;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualActionSummary {
    pub source_tau: Option<f64>,
    pub tau: f64,
    pub psi: f64,
    pub certified_drift: Option<f64>,
    pub lower_bound_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitsFile {
    pub body: BodySpec,
    /// True when the orbit list is a closed-form enumeration.
    pub complete: bool,
    pub orbits: Vec<OrbitJson>,
    /// Solver outputs tracing a listed orbit; `multiplicity` is the period ratio.
    pub merged: Vec<OrbitJson>,
    pub dual_action: Vec<DualActionSummary>,
    pub monotonicity: Option<MonotonicityAudit>,
    pub warnings: Vec<String>,
}

fn solver(e: closed_char::Error) -> CliError {
    CliError::from(e)
}

fn shooting_seeds(body: &ConvexBody<f64>, cfg: &RunConfig) -> Vec<DVector<f64>> {
    let dim = 2 * body.n();
    let mut seeds: Vec<DVector<f64>> = (0..dim)
        .map(|i| {
            let mut v = DVector::zeros(dim);
            v[i] = 1.0;
            v
        })
        .collect();
    seeds.extend(cfg.seeds.iter().map(|s| DVector::from_vec(s.clone())));
    seeds.extend(directions::<f64>(dim, cfg.k_random, cfg.seed));
    seeds
}

pub fn run(cfg: &RunConfig) -> Result<OrbitsFile, CliError> {
    let spec = cfg.body()?.clone();
    let body: ConvexBody<f64> = spec.build().map_err(|e| CliError::Input(format!("body: {e}")))?;
    let is_ellipsoid = matches!(spec, BodySpec::Ellipsoid { .. });
    let analytic = cfg.solvers.analytic.unwrap_or(is_ellipsoid);
    let shooting = cfg.solvers.shooting.unwrap_or(!is_ellipsoid);
    if analytic && !is_ellipsoid {
        return Err(CliError::Input("solvers.analytic needs an ellipsoid body".into()));
    }
    let mut found: Vec<ClosedCharacteristic<f64>> = Vec::new();
    let mut warnings = Vec::new();
    if analytic {
        found.extend(ellipsoid_orbits(&body, cfg.samples, &cfg.tolerances).map_err(solver)?);
    }
    if shooting {
        let (_, rmax2) = body.radius_bounds().map_err(solver)?;
        let opts = ShootOptions {
            t_max: 10.0 * std::f64::consts::TAU * rmax2,
            samples: cfg.samples,
            ..ShootOptions::default()
        };
        let seeds = shooting_seeds(&body, cfg);
        let reports: Vec<_> = seeds.par_iter().map(|s| shoot(&body, s, &opts)).collect();
        for (i, r) in reports.into_iter().enumerate() {
            match r {
                Ok(rep) => {
                    if let Some(o) = rep.orbit {
                        found.push(o);
                    }
                }
                Err(e) => warnings.push(format!("shooting seed {i}: {e}")),
            }
        }
    }
    let mut summaries = Vec::new();
    let mut monotonicity = None;
    if cfg.solvers.dual_action {
        if found.is_empty() {
            warnings.push("dual action skipped: no period estimate from other solvers".into());
        } else {
            let taus: Vec<f64> = found.iter().map(|o| o.tau).collect();
            let tmax = taus.iter().cloned().fold(0.0, f64::max);
            let tmin = taus.iter().cloned().fold(f64::INFINITY, f64::min);
            let a = 3.0 * tmax;
            let phi = build_phi::<f64>(0.9 * tmin / a, cfg.alpha, false).map_err(solver)?;
            let hm = HamiltonianModel::scaled(body.clone(), a, phi).map_err(solver)?;
            let opts = DualActionOptions { samples: cfg.samples, ..DualActionOptions::default() };
            let mut starts: Vec<(Option<f64>, FourierLoop<f64>)> = Vec::new();
            for o in &found {
                starts.push((Some(o.tau), FourierLoop::from_orbit(&hm, o, cfg.modes).map_err(solver)?));
            }
            starts.push((None, FourierLoop::planar(body.n(), 0, cfg.modes, 1.0)));
            let results: Vec<_> = starts.par_iter().map(|(t, l)| (*t, dual_action(&hm, l, &opts))).collect();
            let mut accepted = Vec::new();
            for (t, r) in results {
                match r {
                    Ok(res) if res.psi < 0.0 => {
                        summaries.push(DualActionSummary {
                            source_tau: t,
                            tau: res.orbit.tau,
                            psi: res.psi,
                            certified_drift: res.certified_drift,
                            lower_bound_margin: res.lower_bound_margin,
                        });
                        accepted.push(res.orbit.tau);
                        found.push(res.orbit);
                    }
                    Ok(res) => warnings.push(format!("dual action critical point with Ψ = {} rejected", res.psi)),
                    Err(e) => warnings.push(format!("dual action: {e}")),
                }
            }
            if !accepted.is_empty() {
                monotonicity = Some(monotonicity_audit(&hm, &accepted).map_err(solver)?);
            }
        }
    }
    if found.is_empty() {
        return Err(CliError::Solver("no closed characteristic found".into()));
    }
    let groups = group_orbits(found).map_err(solver)?;
    let orbits: Vec<OrbitJson> = groups.iter().map(|g| OrbitJson::from(&g.prime)).collect();
    let merged = groups.iter().flat_map(|g| g.iterates.iter().map(OrbitJson::from)).collect();
    let complete = analytic && orbits.iter().all(|o| o.source == OrbitSource::Analytic);
    Ok(OrbitsFile { body: spec, complete, orbits, merged, dual_action: summaries, monotonicity, warnings })
}

pub fn summary(file: &OrbitsFile) -> String {
    let mut s = format!("{} closed characteristic(s)\n", file.orbits.len());
    for (i, o) in file.orbits.iter().enumerate() {
        let src = serde_json::to_value(o.source).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        s += &format!("  [{i}] tau = {:.12} source = {src} residual = {:.2e}\n", o.tau, o.residual);
    }
    for w in &file.warnings {
        s += &format!("  warning: {w}\n");
    }
    s
}

pub fn cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let file = run(cfg)?;
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    write_json(&out.join("orbits.json"), &file)?;
    let text = summary(&file);
    std::fs::write(out.join("orbits.txt"), &text).map_err(|e| CliError::Io(e.to_string()))?;
    print!("{text}");
    Ok(())
}
