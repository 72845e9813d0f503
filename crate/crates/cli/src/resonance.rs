//! `resonance`: resonance identity, Morse counts and stability audits.

use std::collections::BTreeMap;
use std::path::Path;

use closed_char::resonance::{
    euler_characteristic, morse_series, resonance_sum, stability_audit, AuditOrbit, CriticalTypeNumbers,
    MorseInput, MorseSeries, ResonanceInput, ResonanceReport, StabilityAudit,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::indices::IndicesFile;
use crate::output::{read_json, write_csv, write_json};
use crate::CliError;

/// Sidecar: orbit id → `k_l(yᵐ)` rows for `m = 1..=K`.
pub type KList = BTreeMap<usize, Vec<Vec<u32>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceFile {
    pub n: usize,
    pub report: ResonanceReport,
    pub audit: StabilityAudit,
    pub morse: Option<MorseSeries>,
    pub notes: Vec<String>,
}

/// Folds sidecar critical type numbers into the index file, validating each.
pub fn apply_klist(file: &mut IndicesFile, klist: &KList) -> Result<(), CliError> {
    for (&id, rows) in klist {
        let o = file
            .orbits
            .iter_mut()
            .find(|o| o.id == id)
            .ok_or_else(|| CliError::Input(format!("critical type numbers for unknown orbit {id}")))?;
        let k = CriticalTypeNumbers { k: rows.clone() };
        let euler = euler_characteristic(&o.ekeland, &k, o.k, file.n)
            .map_err(|e| CliError::Input(format!("orbit {id}: {e}")))?;
        if let Some(prev) = o.chi_hat {
            if prev != euler.chi_hat {
                return Err(CliError::Input(format!(
                    "orbit {id}: supplied critical type numbers give χ̂ = {} but the index pattern forces {prev}",
                    euler.chi_hat
                )));
            }
        }
        o.critical = Some(k);
        o.chi_hat = Some(euler.chi_hat);
    }
    Ok(())
}

pub fn run(file: &IndicesFile, cutoffs: &[usize]) -> Result<ResonanceFile, CliError> {
    let n = file.n;
    let inputs: Vec<ResonanceInput> = file
        .orbits
        .iter()
        .map(|o| ResonanceInput { id: o.id, mean_index: o.mean_index, chi_hat: o.chi_hat })
        .collect();
    let report = resonance_sum(&inputs, n)?;
    let audit_in: Vec<AuditOrbit> = file
        .orbits
        .iter()
        .map(|o| AuditOrbit {
            id: o.id,
            classification: o.classification,
            i1: o.i1,
            nu1: o.nu1,
            s_plus: o.s_plus_at_one,
        })
        .collect();
    let audit = stability_audit(&audit_in, n, file.complete);
    let mut notes = Vec::new();
    if !file.complete {
        notes.push("orbit list not known to be complete; the identity is only indicative".into());
    }
    let morse = if let Some(o) = file.orbits.iter().find(|o| o.critical.is_none()) {
        notes.push(format!("Morse counts skipped: orbit {} has no critical type numbers", o.id));
        None
    } else {
        let morse_in: Vec<MorseInput> = file
            .orbits
            .iter()
            .map(|o| MorseInput {
                id: o.id,
                indices: o.ekeland.iter().map(|e| e.index).collect(),
                mean_index: o.mean_index,
                big_k: o.k.finite().map_or(2, |v| v as usize),
                k: o.critical.clone().unwrap_or(CriticalTypeNumbers { k: Vec::new() }),
            })
            .collect();
        Some(morse_series(&morse_in, n, cutoffs)?)
    };
    Ok(ResonanceFile { n, report, audit, morse, notes })
}

fn verdict(ok: Option<bool>) -> &'static str {
    match ok {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "n/a",
    }
}

pub fn summary(r: &ResonanceFile) -> String {
    let mut s = format!("resonance sum = {:.15} residual = {:.3e}\n", r.report.total, r.report.residual);
    if r.report.incomplete {
        s += "  some orbits lack critical type numbers\n";
    }
    if let Some(m) = &r.morse {
        s += &format!("Morse slope = {:.6} max deviation = {:.3}\n", m.slope, m.max_deviation);
    }
    if r.audit.all_irrationally_elliptic.is_some() {
        s += &format!("two-orbit stability audit: {}\n", verdict(r.audit.all_irrationally_elliptic));
    }
    if r.audit.count_at_least_three.is_some() {
        s += &format!("three-orbit count audit: {}\n", verdict(r.audit.count_at_least_three));
    }
    if let Some(b) = r.audit.min_rho {
        s += &format!("index lower bound on the orbit count: {b} (found {})\n", r.audit.orbit_count);
    }
    for v in &r.audit.violations {
        s += &format!("  violation: {v}\n");
    }
    for note in &r.notes {
        s += &format!("  note: {note}\n");
    }
    s
}

pub fn cmd(cfg: &RunConfig, indices_path: &Path, klist: Option<&Path>) -> Result<(), CliError> {
    let mut file: IndicesFile = read_json(indices_path)?;
    if let Some(p) = klist {
        let k: KList = read_json(p)?;
        apply_klist(&mut file, &k)?;
    }
    let cutoffs = if file.morse_cutoffs.is_empty() { cfg.morse_cutoffs.clone() } else { file.morse_cutoffs.clone() };
    let r = run(&file, &cutoffs)?;
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    write_json(&out.join("resonance.json"), &r)?;
    write_csv(&out.join("resonance.csv"), &["orbit", "mean_index", "chi_hat", "contribution"], &r.report.csv_rows())?;
    if let Some(m) = &r.morse {
        let series: Vec<[String; 4]> = m
            .tables
            .iter()
            .map(|t| {
                [
                    t.cutoff.to_string(),
                    t.m_minus_one.to_string(),
                    format!("{:.17e}", t.expected),
                    format!("{:.17e}", t.m_minus_one as f64 / t.cutoff as f64),
                ]
            })
            .collect();
        write_csv(&out.join("morse_series.csv"), &["cutoff", "m_minus_one", "expected", "ratio"], &series)?;
        if let Some(last) = m.tables.last() {
            let rows: Vec<[String; 2]> =
                last.w.iter().enumerate().map(|(h, w)| [h.to_string(), w.to_string()]).collect();
            write_csv(&out.join("morse.csv"), &["h", "w_h"], &rows)?;
        }
    }
    print!("{}", summary(&r));
    if !r.audit.violations.is_empty() {
        return Err(CliError::Solver(format!("audit violations: {}", r.audit.violations.join("; "))));
    }
    Ok(())
}
