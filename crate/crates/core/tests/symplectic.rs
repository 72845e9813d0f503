mod common;

use std::f64::consts::{PI, TAU};

use closed_char::symplectic::{circle_spectrum, d_omega, diamond, nu_omega, realize, unit, BasicNormalForm, SymplecticMatrix};
use closed_char::Tolerances;
use common::{basic_form, form_angles, random_symplectic, rng};
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

fn is_symplectic(m: &SymplecticMatrix<f64>) -> bool {
    SymplecticMatrix::new(m.matrix().clone(), 1e-9).is_ok()
}

#[test]
fn small_cases() {
    let tol = Tolerances::default();
    let i2 = SymplecticMatrix::<f64>::identity(1);
    assert_eq!(diamond(&i2, &i2), SymplecticMatrix::identity(2));
    assert_eq!(nu_omega(&i2, Complex::new(1.0, 0.0), &tol), 2);
    assert!((d_omega(&i2, Complex::new(-1.0, 0.0)) + 4.0).abs() < 1e-12);
    let n1 = realize(&BasicNormalForm::N1 { lambda: 1, b: 1 }).unwrap();
    assert_eq!(nu_omega(&n1, Complex::new(1.0, 0.0), &tol), 1);
    let theta = TAU * (5f64.sqrt() - 1.0) / 2.0;
    let r = realize(&BasicNormalForm::R { theta }).unwrap();
    assert_eq!(nu_omega(&r, unit(theta), &tol), 1);
    for theta in [0.3f64, 1.0, 2.5] {
        let r = realize(&BasicNormalForm::R { theta }).unwrap();
        let d = d_omega(&r, Complex::new(1.0, 0.0));
        assert!((d - 2.0 * (1.0 - theta.cos())).abs() < 1e-12 && d > 0.0);
    }
    let d2 = realize(&BasicNormalForm::D { lambda: 2 }).unwrap();
    assert_eq!(realize(&BasicNormalForm::R { theta: PI / 2.0 }).unwrap().matrix()[(0, 1)], -1.0);
    assert!(circle_spectrum(&d2, &tol).eigenvalues.is_empty());
    let rd = diamond(&realize(&BasicNormalForm::R { theta: 1.1 }).unwrap(), &d2);
    let c = circle_spectrum(&rd, &tol);
    assert_eq!(c.eigenvalues.len(), 2);
    assert!(c.eigenvalues.iter().all(|e| e.algebraic == 1 && e.geometric == 1));
}

#[test]
fn diamond_is_associative() {
    let mut r = rng(1);
    for (a, b, c) in [(1, 1, 1), (1, 2, 1), (2, 1, 3)] {
        let (m1, m2, m3) = (random_symplectic(&mut r, a, 0.6), random_symplectic(&mut r, b, 0.6), random_symplectic(&mut r, c, 0.6));
        let left = diamond(&diamond(&m1, &m2), &m3);
        let right = diamond(&m1, &diamond(&m2, &m3));
        assert_eq!(left.matrix(), right.matrix());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symplecticity_is_closed(seed in any::<u64>(), a in 1usize..=3, b in 1usize..=2, k in 0usize..5) {
        let mut r = rng(seed);
        let p = random_symplectic(&mut r, a, 0.5);
        let q = random_symplectic(&mut r, a, 0.5);
        let s = random_symplectic(&mut r, b, 0.5);
        prop_assert!(is_symplectic(&p.mul(&q)));
        prop_assert!(is_symplectic(&p.inverse()));
        prop_assert!(is_symplectic(&p.pow(k)));
        prop_assert!(is_symplectic(&p.conjugate_by(&q)));
        prop_assert!(is_symplectic(&diamond(&p, &s)));
        prop_assert!((p.mul(&p.inverse()).matrix() - DMatrix::identity(2 * a, 2 * a)).abs().max() < 1e-10);
    }

    #[test]
    fn nullity_is_additive(f in basic_form(), g in basic_form(), t in 0.0f64..TAU) {
        let tol = Tolerances::default();
        let (m1, m2) = (realize(&f).unwrap(), realize(&g).unwrap());
        let m = diamond(&m1, &m2);
        let mut omegas: Vec<f64> = form_angles(&f).into_iter().chain(form_angles(&g)).collect();
        omegas.extend([0.0, PI, t]);
        for th in omegas {
            let w = unit(th);
            prop_assert_eq!(nu_omega(&m, w, &tol), nu_omega(&m1, w, &tol) + nu_omega(&m2, w, &tol));
            prop_assert_eq!(nu_omega(&m, w.conj(), &tol), nu_omega(&m, w, &tol));
        }
    }

    #[test]
    fn d_omega_vanishes_on_the_spectrum(f in basic_form(), t in 0.0f64..TAU) {
        let tol = Tolerances::default();
        let m = realize(&f).unwrap();
        for th in form_angles(&f).into_iter().chain([0.0, PI, t]) {
            let w = unit(th);
            let zero = d_omega(&m, w).abs() < 1e-9;
            prop_assert_eq!(zero, nu_omega(&m, w, &tol) >= 1, "θ = {}", th);
        }
    }

    #[test]
    fn d_omega_sign_survives_conjugation(f in basic_form(), g in basic_form(), seed in any::<u64>(), t in 0.0f64..TAU) {
        let m = diamond(&realize(&f).unwrap(), &realize(&g).unwrap());
        let p = random_symplectic(&mut rng(seed), 2, 0.4);
        let c = m.conjugate_by(&p);
        let w = unit(t);
        let d = d_omega(&m, w);
        prop_assume!(d.abs() > 1e-6);
        let dc = d_omega(&c, w);
        prop_assert!(d.signum() == dc.signum() && (d - dc).abs() < 1e-8 * d.abs().max(1.0), "{} vs {}", d, dc);
    }
}
