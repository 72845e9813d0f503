use closed_char::geometry::{
    build_phi, fenchel, sampling::directions, validate_body, ConvexBody, HamiltonianModel, Polynomial,
};
use closed_char::Error;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn random_points(dim: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    directions::<f64>(dim, count, seed)
        .into_iter()
        .map(|d| d * rng.random_range(0.2..3.0))
        .collect()
}

fn bodies() -> Vec<ConvexBody<f64>> {
    vec![
        ConvexBody::<f64>::ellipsoid(vec![1.0, 2f64.sqrt() * golden()]).unwrap(),
        ConvexBody::<f64>::ellipsoid(vec![1.0, 1.3, 1.7]).unwrap(),
        ConvexBody::generic(Polynomial::perturbed_ellipsoid(&[1.0, 1.4], 1e-3)).unwrap(),
    ]
}

fn models() -> Vec<HamiltonianModel<f64>> {
    let phi = build_phi::<f64>(0.1, 1.5, false).unwrap();
    let mut out = Vec::new();
    for b in bodies() {
        out.push(HamiltonianModel::scaled(b.clone(), 20.0, phi.clone()).unwrap());
        out.push(HamiltonianModel::homogeneous(b, 1.5).unwrap());
    }
    out
}

#[test]
fn level_set_value() {
    let b = ConvexBody::<f64>::ellipsoid(vec![1.0, 2.0]).unwrap();
    let hm = HamiltonianModel::homogeneous(b.clone(), 1.7).unwrap();
    for d in directions::<f64>(4, 20, 1) {
        let y = b.project(&d).unwrap();
        assert!((hm.value(&y).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    for hm in models() {
        for x in random_points(2 * hm.n(), 100, 5) {
            let jet = hm.eval(&x, true).unwrap();
            let h = 1e-6 * x.norm();
            let fd = DVector::from_fn(x.len(), |i, _| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                (hm.value(&xp).unwrap() - hm.value(&xm).unwrap()) / (2.0 * h)
            });
            let rel = (&fd - &jet.grad).norm() / jet.grad.norm();
            assert!(rel < 1e-6, "gradient defect {rel:e}");
            let hess = jet.hess.unwrap();
            let fdh = nalgebra::DMatrix::from_fn(x.len(), x.len(), |i, k| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                (hm.eval(&xp, false).unwrap().grad[i] - hm.eval(&xm, false).unwrap().grad[i]) / (2.0 * h)
            });
            let rel = (&fdh - &hess).norm() / hess.norm();
            assert!(rel < 1e-5, "hessian defect {rel:e}");
        }
    }
}

#[test]
fn hessian_bounds_positive() {
    let b = ConvexBody::<f64>::ellipsoid(vec![1.0, 2.0]).unwrap();
    let phi = build_phi::<f64>(0.1, 1.5, false).unwrap();
    let bounds = HamiltonianModel::scaled(b, 10.0, phi).unwrap().bounds().unwrap();
    assert!(bounds.r > 0.0 && bounds.big_r >= bounds.r);
    assert!(bounds.eps1 > 0.0 && bounds.eps1 < 0.5);
    assert!(bounds.eps2 > 0.0 && bounds.eps2 < 0.5);
}

#[test]
fn hessian_at_origin_is_singular() {
    let hm = &models()[1];
    assert_eq!(hm.eval(&DVector::zeros(4), true).unwrap_err(), Error::SingularPoint);
    assert!(hm.eval(&DVector::zeros(4), false).is_ok());
}

#[test]
fn conjugate_exponent() {
    let b = ConvexBody::<f64>::ellipsoid(vec![1.0, 1.0]).unwrap();
    let g = fenchel(&HamiltonianModel::homogeneous(b, 1.5).unwrap());
    assert!((g.beta().unwrap() - 3.0).abs() < 1e-15);
}

#[test]
fn dual_gradient_inverts_primal_gradient() {
    for hm in models() {
        let g = fenchel(&hm);
        for x in random_points(2 * hm.n(), 100, 9) {
            let y = hm.eval(&x, false).unwrap().grad;
            let back = g.grad(&y).unwrap();
            let rel = (&back - &x).norm() / x.norm();
            assert!(rel < 1e-8, "involution defect {rel:e}");
            // Fenchel equality on the gradient graph, strict inequality off it
            let gy = g.value(&y).unwrap();
            let hx = hm.value(&x).unwrap();
            assert!((x.dot(&y) - hx - gy).abs() < 1e-8 * (1.0 + gy.abs()));
            let x2 = &x * 1.1;
            assert!(x2.dot(&y) < hm.value(&x2).unwrap() + gy);
        }
    }
}

#[test]
fn dual_hessian_bounds() {
    let b = ConvexBody::<f64>::ellipsoid(vec![1.0, 2.0]).unwrap();
    let phi = build_phi::<f64>(0.1, 1.5, false).unwrap();
    let hm = HamiltonianModel::scaled(b, 10.0, phi).unwrap();
    let bounds = hm.bounds().unwrap();
    let g = fenchel(&hm);
    for x in random_points(4, 100, 2) {
        let y = hm.eval(&x, false).unwrap().grad;
        let gh = g.eval(&y, true).unwrap().hess.unwrap();
        for e in gh.symmetric_eigenvalues().iter() {
            assert!(*e >= (1.0 / bounds.big_r) * (1.0 - 1e-9) && *e <= (1.0 / bounds.r) * (1.0 + 1e-9));
        }
    }
}

#[test]
fn phi_normalization_and_shape() {
    let phi = build_phi::<f64>(0.3, 1.9, true).unwrap();
    let [v0, d0, s0] = phi.eval(0.0);
    assert_eq!((v0, d0), (0.0, 0.0));
    assert!((s0 - 1.0).abs() < 1e-14);
    let t = 0.5 * (1.0 + phi.t_splice);
    assert!((phi.value(t) - phi.c * t.powf(phi.alpha)).abs() < 1e-14 * phi.value(t));
    assert!(phi.asymptotic_slope() < phi.vartheta);
    assert!(phi.sigma > 0.0);
    let far = 1e6 * phi.t_splice;
    assert!(phi.d1(far) / far < phi.vartheta);
}

#[test]
fn phi_blends_are_c2() {
    let phi = build_phi::<f64>(0.1, 1.5, false).unwrap();
    for s in [1.0, phi.t_splice] {
        for edge in [s * (1.0 - 1e-3), s * (1.0 + 1e-3)] {
            let a = phi.eval(edge - 1e-12);
            let b = phi.eval(edge + 1e-12);
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-8, "jump in derivative {k} at {edge}");
            }
        }
    }
    for s in [0.3, 1.0, 5.0, 1e3] {
        let t = phi.inverse_d1(phi.d1(s)).unwrap();
        assert!((t - s).abs() < 1e-10 * s);
    }
}

#[test]
fn phi_parameter_errors() {
    assert!(matches!(build_phi::<f64>(0.1, 1.5, true), Err(Error::Infeasible(_))));
    assert!(matches!(build_phi::<f64>(1.5, 1.5, false), Err(Error::Range(_))));
    assert!(matches!(build_phi::<f64>(0.5, 2.5, false), Err(Error::Range(_))));
}

#[test]
fn bodies_pass_sampled_validation() {
    for b in bodies() {
        let rep = validate_body(&b).unwrap();
        assert!(rep.homogeneity < 1e-9 && rep.euler < 1e-9 && rep.radial_hessian < 1e-9);
        assert!(rep.tangent_convexity > 0.0);
    }
}

#[test]
fn body_json_round_trip() {
    use closed_char::geometry::BodySpec;
    let spec: BodySpec = serde_json::from_str(r#"{"type":"ellipsoid","r":[1.0,1.5]}"#).unwrap();
    assert_eq!(spec.build::<f64>().unwrap().n(), 2);
    let back = serde_json::to_string(&spec).unwrap();
    assert_eq!(serde_json::from_str::<BodySpec>(&back).unwrap(), spec);
    let generic = r#"{"type":"generic","coeffs":[{"c":1.0,"e":[2,0]},{"c":0.5,"e":[0,2]}]}"#;
    let b = serde_json::from_str::<BodySpec>(generic).unwrap().build::<f64>().unwrap();
    let x = DVector::from_vec(vec![1.0, 0.0]);
    assert!((b.gauge(&x).unwrap() - 1.0).abs() < 1e-12);
    assert!(serde_json::from_str::<BodySpec>(r#"{"type":"ellipsoid","r":[1.0],"x":1}"#).is_err());
}

#[test]
fn gauge_in_single_precision() {
    let b = ConvexBody::<f32>::ellipsoid(vec![1.0, 2.0]).unwrap();
    let x = DVector::from_vec(vec![0.0f32, 2.0, 0.0, 0.0]);
    assert!((b.gauge(&x).unwrap() - 1.0).abs() < 1e-6);
}

proptest! {
    #[test]
    fn gauge_homogeneity_degrees(seed in 0u64..1000, s in 0.1f64..10.0) {
        for b in bodies() {
            let x = &random_points(2 * b.n(), 1, seed)[0];
            let g1 = b.jet(x).unwrap();
            let g2 = b.jet(&(x * s)).unwrap();
            prop_assert!((g2.j - s * g1.j).abs() <= 1e-9 * g2.j);
            prop_assert!((&g2.grad - &g1.grad).norm() <= 1e-9 * g1.grad.norm());
            prop_assert!((&g2.hess * s - &g1.hess).norm() <= 1e-8 * g1.hess.norm());
            prop_assert!((g1.grad.dot(x) - g1.j).abs() <= 1e-9 * g1.j);
        }
    }
}
