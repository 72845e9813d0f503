mod common;

use closed_char::floquet::{Classification, StabilityKind};
use closed_char::geometry::ConvexBody;
use closed_char::index::synthetic::composite_path;
use closed_char::index::{iteration_profile, IterationEntry, MinimalPeriod};
use closed_char::orbit::ellipsoid_orbits;
use closed_char::resonance::{
    analyze_orbit, euler_characteristic, morse_counts, morse_series, nondegenerate_chi, resonance_sum, rho_bound,
    stability_audit, AuditOrbit, CriticalTypeNumbers, MorseInput, OrbitAnalysis, ResonanceInput, SLOPE_GRID,
};
use closed_char::symplectic::BasicNormalForm;
use closed_char::{Error, Tolerances};
use common::admissible;
use num_rational::Ratio;
use proptest::prelude::*;

fn entries(indices: &[i64], nullity: usize) -> Vec<IterationEntry> {
    indices.iter().enumerate().map(|(i, &index)| IterationEntry { m: i + 1, index, nullity }).collect()
}

/// Maslov-type index of the j-th circle's m-th iterate.
fn ellipsoid_index(r: &[f64], j: usize, m: usize) -> i64 {
    let mut i = 2 * m as i64 - 1;
    for (k, rk) in r.iter().enumerate() {
        if k != j {
            i += 2 * (m as f64 * r[j] * r[j] / (rk * rk)).floor() as i64 + 1;
        }
    }
    i
}

fn analyses(r: &[f64], m_max: usize) -> Vec<OrbitAnalysis<f64>> {
    let tol = Tolerances::default();
    let body = ConvexBody::<f64>::ellipsoid(r.to_vec()).unwrap();
    ellipsoid_orbits(&body, 64, &tol)
        .unwrap()
        .iter()
        .enumerate()
        .map(|(id, o)| analyze_orbit(id, &body, 1.5, o, 256, m_max, &tol, None).unwrap())
        .collect()
}

#[test]
fn nondegenerate_chi_from_parities() {
    assert_eq!(nondegenerate_chi(&entries(&[0, 4], 1)).unwrap(), Ratio::from_integer(1));
    assert_eq!(nondegenerate_chi(&entries(&[1, 4], 1)).unwrap(), Ratio::new(-1, 2));
    assert_eq!(nondegenerate_chi(&entries(&[1, 3], 1)).unwrap(), Ratio::from_integer(-1));
    assert_eq!(nondegenerate_chi(&entries(&[2, 5], 1)).unwrap(), Ratio::new(1, 2));
    assert!(matches!(nondegenerate_chi(&entries(&[0, 4], 3)), Err(Error::Precondition(_))));
}

#[test]
fn two_routes_agree_on_nondegenerate_patterns() {
    for i1 in -3..4i64 {
        for gap in 0..5i64 {
            let e = entries(&[i1, i1 + gap], 1);
            let k = CriticalTypeNumbers::nondegenerate(&e, 2).unwrap();
            let chi = euler_characteristic(&e, &k, MinimalPeriod::Finite(2), 2).unwrap();
            assert_eq!(chi.chi_hat, nondegenerate_chi(&e).unwrap());
        }
    }
}

#[test]
fn degenerate_k2_bound() {
    // i(y) = 0, i(y²) = 4, ν = 3, K = 2, n = 3: every admissible choice gives χ̂ ≤ 1
    let e = entries(&[0, 4], 3);
    let mut best = Ratio::from_integer(i64::MIN / 4);
    let mut admissible = 0;
    for code in 0..(3u32.pow(6)) {
        let digits: Vec<u32> = (0..6).map(|p| (code / 3u32.pow(p)) % 3).collect();
        let k = CriticalTypeNumbers { k: vec![vec![digits[0], digits[1], digits[2], 0, 0], vec![digits[3], digits[4], digits[5], 0, 0]] };
        if k.validate(&e, 3).is_err() {
            continue;
        }
        admissible += 1;
        let chi = euler_characteristic(&e, &k, MinimalPeriod::Finite(2), 3).unwrap().chi_hat;
        best = best.max(chi);
    }
    assert!(admissible > 0);
    assert_eq!(best, Ratio::from_integer(1));
}

#[test]
fn unbounded_k_with_degenerate_iterates_is_unsupported() {
    let e = entries(&[0, 4], 3);
    let k = CriticalTypeNumbers { k: vec![vec![0, 1, 0, 0, 0], vec![0, 1, 0, 0, 0]] };
    assert!(matches!(
        euler_characteristic(&e, &k, MinimalPeriod::Unbounded, 3),
        Err(Error::UnsupportedNormalForm(_))
    ));
}

proptest! {
    #[test]
    fn validator_matches_the_exclusion_rules(row in proptest::collection::vec(0u32..3, 5), nu in 2usize..=5) {
        // degenerate iterates only; ν = 1 rows are pinned by the index pattern
        let e = vec![IterationEntry { m: 1, index: 0, nullity: nu }];
        let k = CriticalTypeNumbers { k: vec![row.clone()] };
        prop_assert_eq!(k.validate(&e, 3).is_ok(), admissible(&row, nu));
    }
}

#[test]
fn validator_rejects_bad_shapes() {
    let e = entries(&[0], 1);
    assert!(CriticalTypeNumbers { k: vec![vec![1, 0]] }.validate(&e, 2).is_err());
    assert!(CriticalTypeNumbers { k: vec![vec![0, 0, 0]] }.validate(&e, 2).is_err());
    assert!(CriticalTypeNumbers { k: vec![vec![1, 0, 0]] }.validate(&e, 2).is_ok());
}

#[test]
fn ellipsoid_indices_match_closed_form() {
    for r in [vec![1.0, 1.3], vec![1.0, 1.3, 1.7]] {
        let n = r.len();
        for a in analyses(&r, 6) {
            let j = a.id;
            for e in &a.entries {
                assert_eq!(e.index + n as i64, ellipsoid_index(&r, j, e.m), "orbit {j}, m = {}", e.m);
                assert_eq!(e.nullity, 1);
            }
            let mean: f64 = 2.0 * r.iter().map(|rk| r[j] * r[j] / (rk * rk)).sum::<f64>();
            assert!((a.profile.mean_index - mean).abs() < 1e-9);
            assert_eq!(a.chi_hat, Some(Ratio::from_integer(1)));
            assert_eq!(a.profile.k, MinimalPeriod::Finite(2));
        }
    }
}

#[test]
fn resonance_identity_on_ellipsoids() {
    for r in [vec![1.0], vec![1.0, 2f64.sqrt() * 1.618_033_988_749_895], vec![1.0, 1.3, 1.7]] {
        let n = r.len();
        let inputs: Vec<ResonanceInput> = analyses(&r, 2).iter().map(|a| a.resonance_input()).collect();
        let rep = resonance_sum(&inputs, n).unwrap();
        assert!(rep.residual <= 1e-9, "{r:?}: {}", rep.residual);
        assert!(!rep.incomplete);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["orbits"][0]["chi_hat"]["den"], 1);
    }
}

#[test]
fn resonance_rejects_small_mean_index() {
    let bad = [ResonanceInput { id: 0, mean_index: 2.0, chi_hat: Some(Ratio::from_integer(1)) }];
    assert!(matches!(resonance_sum(&bad, 2), Err(Error::InvariantViolation(_))));
    assert!(resonance_sum(&bad, 1).is_ok());
    let partial = [
        ResonanceInput { id: 1, mean_index: 3.0, chi_hat: None },
        ResonanceInput { id: 0, mean_index: 4.0, chi_hat: Some(Ratio::from_integer(1)) },
    ];
    let rep = resonance_sum(&partial, 2).unwrap();
    assert!(rep.incomplete);
    assert_eq!(rep.orbits[0].id, 0);
}

fn morse_inputs(r: &[f64], depth: usize) -> Vec<MorseInput> {
    analyses(r, 2)
        .iter()
        .map(|a| MorseInput {
            id: a.id,
            indices: (1..=depth).map(|m| a.profile.index(m) - r.len() as i64).collect(),
            mean_index: a.profile.mean_index,
            big_k: 2,
            k: a.critical.clone().unwrap(),
        })
        .collect()
}

#[test]
fn morse_counts_trend_and_bound() {
    let r = vec![1.0, 1.3, 1.7];
    let inputs = morse_inputs(&r, 1200);
    let series = morse_series(&inputs, 3, &SLOPE_GRID).unwrap();
    assert!((series.slope - 0.5).abs() <= 0.01, "slope {}", series.slope);
    for t in &series.tables {
        assert!(t.w.iter().all(|&w| w as f64 <= t.w_bound));
    }
    assert!(series.max_deviation < 20.0);
    // deeper tables change nothing
    let deeper = morse_inputs(&r, 2400);
    assert_eq!(morse_counts(&deeper, 3, 2000).unwrap().w, morse_counts(&inputs, 3, 2000).unwrap().w);
    let shallow = morse_inputs(&r, 50);
    assert!(matches!(morse_counts(&shallow, 3, 2000), Err(Error::Depth { .. })));
}

#[test]
fn stability_audits() {
    let tol = Tolerances::default();
    for r in [vec![1.0, 1.3], vec![1.0, 1.3, 1.7]] {
        let n = r.len();
        let orbits: Vec<AuditOrbit> = analyses(&r, 2)
            .iter()
            .map(|a| AuditOrbit {
                id: a.id,
                classification: a.monodromy.classification,
                i1: a.profile.i1,
                nu1: a.profile.nu1,
                s_plus: a.profile.splitting.iter().find(|s| s.omega.im == 0.0 && s.omega.re > 0.0).unwrap().s_plus,
            })
            .collect();
        let audit = stability_audit(&orbits, n, true);
        assert!(audit.violations.is_empty(), "{:?}", audit.violations);
        if n == 2 {
            assert_eq!(audit.all_irrationally_elliptic, Some(true));
        } else {
            assert_eq!(audit.count_at_least_three, Some(true));
        }
    }
    // N1(1,1) ⋄ R(θ) ⋄ N1(1,−1): 2S⁺ − ν = 0 at 1
    let path = composite_path(
        &[
            (BasicNormalForm::N1 { lambda: 1, b: 1 }, 1),
            (BasicNormalForm::R { theta: 1.0 }, 0),
            (BasicNormalForm::N1 { lambda: 1, b: -1 }, 1),
        ],
        32,
        None,
    )
    .unwrap();
    let p = iteration_profile(&path, 2, &tol).unwrap();
    let s = p.splitting.iter().find(|s| s.omega.im == 0.0 && s.omega.re > 0.0).unwrap();
    assert_eq!(2 * s.s_plus - p.nu1 as i64, 0);
    assert_eq!(rho_bound(p.i1, s.s_plus, p.nu1, 3), (p.i1 + 3).div_euclid(2));
    let flagged = stability_audit(
        &[AuditOrbit {
            id: 0,
            classification: Classification { degenerate: false, kind: StabilityKind::Mixed },
            i1: 3,
            nu1: 1,
            s_plus: 1,
        }; 2],
        2,
        false,
    );
    assert_eq!(flagged.all_irrationally_elliptic, Some(false));
    assert_eq!(flagged.violations.len(), 1);
}
