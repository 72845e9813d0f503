use closed_char::floquet::{classify_matrix, linearize, tangent_checks, MonodromyJson, StabilityKind};
use closed_char::geometry::{build_phi, ConvexBody, HamiltonianModel};
use closed_char::index::normal_form::normal_form_decomposition;
use closed_char::orbit::{ellipsoid_orbits, ellipsoid_period};
use closed_char::symplectic::{diamond, realize, BasicNormalForm, SymplecticMatrix};
use closed_char::Tolerances;
use std::f64::consts::TAU;

fn radii() -> Vec<f64> {
    vec![1.0, 1.1 * 2f64.sqrt().sqrt()]
}

fn scaled(body: &ConvexBody<f64>, alpha: f64) -> HamiltonianModel<f64> {
    let r = body.semi_axes().unwrap();
    let periods: Vec<f64> = r.iter().map(|&x| ellipsoid_period(x)).collect();
    let tmax = periods.iter().cloned().fold(0.0, f64::max);
    let tmin = periods.iter().cloned().fold(f64::INFINITY, f64::min);
    let a = 3.0 * tmax;
    let phi = build_phi::<f64>(0.9 * tmin / a, alpha, false).unwrap();
    HamiltonianModel::scaled(body.clone(), a, phi).unwrap()
}

#[test]
fn ellipsoid_monodromy_normal_form() {
    let tol = Tolerances::default();
    let r = radii();
    let body = ConvexBody::<f64>::ellipsoid(r.clone()).unwrap();
    let hm = HamiltonianModel::homogeneous(body.clone(), 1.5).unwrap();
    let orbits = ellipsoid_orbits(&body, 128, &tol).unwrap();
    for (j, orbit) in orbits.iter().enumerate() {
        let md = linearize(&hm, orbit, 256, &tol).unwrap();
        assert!((md.period - orbit.tau / 1.5).abs() < 1e-12);
        let k = 1 - j;
        let theta = (TAU * r[j] * r[j] / (r[k] * r[k])).rem_euclid(TAU);
        let nf = normal_form_decomposition(md.monodromy(), &tol).unwrap();
        assert_eq!(nf[0], BasicNormalForm::N1 { lambda: 1, b: 1 });
        match nf[1] {
            BasicNormalForm::R { theta: t } => assert!((t - theta).abs() < 1e-7, "{t} vs {theta}"),
            other => panic!("unexpected factor {other:?}"),
        }
        assert_eq!(md.multiplicity_at_one(), 2);
        assert!((md.monodromy().matrix().determinant() - 1.0).abs() < 1e-9);
        assert_eq!(md.classification.kind, StabilityKind::IrrationallyElliptic);
        assert!(!md.classification.degenerate);
        assert!(md.warnings.is_empty(), "{:?}", md.warnings);
        for m in md.path.matrices() {
            assert!(m.defect() < 1e-10);
        }
    }
}

#[test]
fn ellipsoid_in_r6_is_irrationally_elliptic() {
    let tol = Tolerances::default();
    let body = ConvexBody::<f64>::ellipsoid(vec![1.0, 1.3, 1.7]).unwrap();
    let hm = HamiltonianModel::homogeneous(body.clone(), 1.5).unwrap();
    let orbit = &ellipsoid_orbits(&body, 128, &tol).unwrap()[0];
    let md = linearize(&hm, orbit, 256, &tol).unwrap();
    assert_eq!(md.multiplicity_at_one(), 2);
    assert_eq!(md.classification.kind, StabilityKind::IrrationallyElliptic);
}

#[test]
fn synthetic_classifications() {
    let tol = Tolerances::default();
    let n1 = realize(&BasicNormalForm::N1 { lambda: 1, b: 1 }).unwrap();
    let hyper = diamond(&n1, &realize(&BasicNormalForm::D { lambda: 2 }).unwrap());
    let (c, w) = classify_matrix(&hyper, &tol);
    assert_eq!(c.kind, StabilityKind::Hyperbolic);
    assert!(!c.degenerate);
    assert!(w.is_empty());
    let rational = diamond(&n1, &realize(&BasicNormalForm::R { theta: TAU * 3.0 / 7.0 }).unwrap());
    let (c, _) = classify_matrix(&rational, &tol);
    assert_eq!(c.kind, StabilityKind::Elliptic);
    let (c, _) = classify_matrix(&SymplecticMatrix::<f64>::identity(2), &tol);
    assert!(c.degenerate);
    let mixed = diamond(&hyper, &realize(&BasicNormalForm::R { theta: 1.0 }).unwrap());
    assert_eq!(classify_matrix(&mixed, &tol).0.kind, StabilityKind::Mixed);
}

#[test]
fn marginal_multiplier_warns() {
    let tol = Tolerances::default();
    let n1 = realize(&BasicNormalForm::N1 { lambda: 1, b: 1 }).unwrap();
    let (sn, cs) = 1.0f64.sin_cos();
    let a = nalgebra::DMatrix::from_row_slice(2, 2, &[cs, -sn, sn, cs]) * (1.0 + 1e-7);
    let inv_t = a.clone().try_inverse().unwrap().transpose();
    let mut m = nalgebra::DMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(&a);
    m.view_mut((2, 2), (2, 2)).copy_from(&inv_t);
    let marginal = SymplecticMatrix::new(m, 1e-10).unwrap();
    let (_, w) = classify_matrix(&diamond(&n1, &marginal), &tol);
    assert_eq!(w.len(), 4);
    let (_, w) = classify_matrix(&diamond(&n1, &realize(&BasicNormalForm::R { theta: 1.0 }).unwrap()), &tol);
    assert!(w.is_empty());
}

#[test]
fn tangent_structure_of_scaled_orbit() {
    let tol = Tolerances::default();
    let body = ConvexBody::<f64>::ellipsoid(radii()).unwrap();
    let orbits = ellipsoid_orbits(&body, 128, &tol).unwrap();
    let mut blocks = Vec::new();
    for alpha in [1.5, 1.8] {
        let hm = scaled(&body, alpha);
        for orbit in &orbits {
            let md = linearize(&hm, orbit, 256, &tol).unwrap();
            assert_eq!(md.multiplicity_at_one(), 2);
            let rep = tangent_checks(&md, &hm, orbit.tau).unwrap();
            assert!(rep.fixed_vector < 1e-7, "{rep:?}");
            assert!(rep.tangent_invariance < 1e-7, "{rep:?}");
            assert!(rep.gamma < 0.0);
            assert!((rep.gamma - rep.gamma_expected).abs() < 1e-6 * rep.gamma_expected.abs(), "{rep:?}");
            assert!(rep.gamma_remainder < 1e-7);
            let json = serde_json::to_string(&MonodromyJson::new(&md, Some(rep.clone()))).unwrap();
            assert!(json.contains("irrationally-elliptic"));
            blocks.push(rep.block);
        }
    }
    let half = orbits.len();
    for j in 0..half {
        for (a, b) in blocks[j].iter().flatten().zip(blocks[j + half].iter().flatten()) {
            assert!((a - b).abs() < 1e-7);
        }
    }
}

#[test]
fn homogeneous_model_rejects_tangent_checks() {
    let tol = Tolerances::default();
    let body = ConvexBody::<f64>::ellipsoid(radii()).unwrap();
    let hm = HamiltonianModel::homogeneous(body.clone(), 1.5).unwrap();
    let orbit = &ellipsoid_orbits(&body, 64, &tol).unwrap()[0];
    let md = linearize(&hm, orbit, 64, &tol).unwrap();
    assert!(tangent_checks(&md, &hm, orbit.tau).is_err());
}
