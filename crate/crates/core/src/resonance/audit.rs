//! Checks tied to the multiplicity results: irrational ellipticity when
//! `n = 2` with two orbits, at least three orbits when `n = 3`, and the
//! lower bound `⌊(i(y,1) + 2S⁺ − ν(y,1) + n)/2⌋`.

use serde::{Deserialize, Serialize};

use crate::floquet::{Classification, StabilityKind};

/// Per-orbit audit inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditOrbit {
    pub id: usize,
    pub classification: Classification,
    /// `i(y,1)`, before the Ekeland shift.
    pub i1: i64,
    pub nu1: usize,
    /// `S⁺_{γ(τ)}(1)`.
    pub s_plus: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityAudit {
    pub n: usize,
    pub orbit_count: usize,
    pub rho_bounds: Vec<(usize, i64)>,
    pub min_rho: Option<i64>,
    /// Set when `n = 2` and exactly two orbits were found.
    pub all_irrationally_elliptic: Option<bool>,
    /// Set when `n = 3` and the orbit list is known to be complete.
    pub count_at_least_three: Option<bool>,
    pub violations: Vec<String>,
}

pub fn rho_bound(i1: i64, s_plus: i64, nu1: usize, n: usize) -> i64 {
    (i1 + 2 * s_plus - nu1 as i64 + n as i64).div_euclid(2)
}

/// `complete` marks orbit lists known to contain every closed characteristic
/// (closed-form ellipsoid enumeration).
pub fn stability_audit(orbits: &[AuditOrbit], n: usize, complete: bool) -> StabilityAudit {
    let mut violations = Vec::new();
    let rho_bounds: Vec<(usize, i64)> = orbits.iter().map(|o| (o.id, rho_bound(o.i1, o.s_plus, o.nu1, n))).collect();
    let min_rho = rho_bounds.iter().map(|r| r.1).min();
    let all_irrationally_elliptic = (n == 2 && orbits.len() == 2).then(|| {
        let ok = orbits.iter().all(|o| o.classification.kind == StabilityKind::IrrationallyElliptic);
        if !ok {
            violations.push("two orbits in ℝ⁴ but not both irrationally elliptic".to_string());
        }
        ok
    });
    let count_at_least_three = (n == 3 && complete).then(|| {
        let ok = orbits.len() >= 3;
        if !ok {
            violations.push(format!("only {} closed characteristics in ℝ⁶", orbits.len()));
        }
        ok
    });
    if complete {
        if let Some(r) = min_rho {
            if (orbits.len() as i64) < r {
                violations.push(format!("{} orbits but the index bound requires {r}", orbits.len()));
            }
        }
    }
    StabilityAudit {
        n,
        orbit_count: orbits.len(),
        rho_bounds,
        min_rho,
        all_irrationally_elliptic,
        count_at_least_three,
        violations,
    }
}
