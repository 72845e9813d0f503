use closed_char::ode::{Control, Dop853};
use closed_char::Result;
use nalgebra::DVector;

fn oscillator(_t: f64, y: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(DVector::from_vec(vec![-y[1], y[0]]))
}

#[test]
fn harmonic_oscillator_full_turn() {
    let y0 = DVector::from_vec(vec![1.0, 0.0]);
    let ode = Dop853::default();
    let tau = 2.0 * std::f64::consts::PI;
    let (t, y, stats) = ode.integrate(&oscillator, 0.0, &y0, tau, &[], |_| Control::Continue).unwrap();
    assert_eq!(t, tau);
    assert!((&y - &y0).norm() < 1e-10, "closure {:e}", (&y - &y0).norm());
    assert!(stats.accepted > 5);
}

#[test]
fn outputs_land_on_requested_times() {
    let y0 = DVector::from_vec(vec![1.0, 0.0]);
    let times: Vec<f64> = (0..=50).map(|k| 0.1 * k as f64).collect();
    let ys = Dop853::default().solve_at(&oscillator, 0.0, &y0, &times).unwrap();
    for (t, y) in times.iter().zip(&ys) {
        assert!((y[0] - t.cos()).abs() < 1e-11 && (y[1] - t.sin()).abs() < 1e-11);
    }
}

#[test]
fn exponential_growth_eighth_order() {
    let f = |_t: f64, y: &DVector<f64>| -> Result<DVector<f64>> { Ok(y.clone()) };
    let y0 = DVector::from_vec(vec![1.0]);
    let ys = Dop853::new(1e-13, 1e-13).solve_at(&f, 0.0, &y0, &[3.0]).unwrap();
    assert!((ys[0][0] - 3f64.exp()).abs() < 1e-10 * 3f64.exp());
}

#[test]
fn early_stop_and_hermite() {
    let y0 = DVector::from_vec(vec![1.0, 0.0]);
    let mut crossing = None;
    Dop853::default()
        .integrate(&oscillator, 0.0, &y0, 10.0, &[], |s| {
            if s.y0[0] > 0.0 && s.y1[0] <= 0.0 {
                let (mut a, mut b) = (s.t0, s.t1);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if s.hermite(m)[0] > 0.0 {
                        a = m
                    } else {
                        b = m
                    }
                }
                crossing = Some(a);
                return Control::Stop;
            }
            Control::Continue
        })
        .unwrap();
    assert!((crossing.unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
}

#[test]
fn single_precision_runs() {
    let f = |_t: f32, y: &DVector<f32>| -> Result<DVector<f32>> { Ok(DVector::from_vec(vec![-y[1], y[0]])) };
    let y0 = DVector::from_vec(vec![1.0f32, 0.0]);
    let ys = Dop853::new(1e-6f32, 1e-6).solve_at(&f, 0.0, &y0, &[1.0]).unwrap();
    assert!((ys[0][0] - 1f32.cos()).abs() < 1e-4);
}
