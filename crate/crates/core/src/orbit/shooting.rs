//! Shooting on the characteristic flow with a transverse section through the seed.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::linalg::j_matrix;
use crate::ode::{Control, Dop853};
use crate::orbit::characteristic::{characteristic_field, ClosedCharacteristic, OrbitSource};
use crate::scalar::{lit, Float};

pub const MAX_NEWTON: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootOptions {
    pub t_max: f64,
    pub samples: usize,
    /// A return is polished when it comes back within this fraction of the
    /// body's diameter.
    pub gate: f64,
    pub close_tol: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { t_max: 100.0, samples: 256, gate: 1e-3, close_tol: 1e-8 }
    }
}

/// What happened to a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootReport<T: Float> {
    pub orbit: Option<ClosedCharacteristic<T>>,
    /// Section crossings examined before `t_max`.
    pub returns: usize,
    /// Closest return distance relative to the diameter.
    pub best_gap: f64,
    /// Largest `|j(y(t)) − 1|` along the integrated seed trajectory.
    pub energy_drift: f64,
    pub newton_failures: Vec<String>,
}

fn integrator<T: Float>() -> Dop853<T> {
    Dop853::new(lit(1e-12), lit(1e-12))
}

/// Flow map together with its variational matrix `∂φ_T/∂y`.
fn flow_with_jacobian<T: Float>(body: &ConvexBody<T>, y0: &DVector<T>, t: T) -> Result<(DVector<T>, DMatrix<T>)> {
    let d = y0.len();
    let j = j_matrix::<T>(d / 2);
    let rhs = |_t: T, z: &DVector<T>| -> Result<DVector<T>> {
        let y = z.rows(0, d).into_owned();
        let jet = body.jet(&y)?;
        let a = &j * &jet.hess;
        let phi = DMatrix::from_column_slice(d, d, z.rows(d, d * d).as_slice());
        let mut out = DVector::zeros(d + d * d);
        out.rows_mut(0, d).copy_from(&(&j * &jet.grad));
        out.rows_mut(d, d * d).copy_from_slice((a * phi).as_slice());
        Ok(out)
    };
    let mut z = DVector::zeros(d + d * d);
    z.rows_mut(0, d).copy_from(y0);
    z.rows_mut(d, d * d).copy_from_slice(DMatrix::<T>::identity(d, d).as_slice());
    let (_, z1, _) = integrator().integrate(&rhs, T::ZERO, &z, t, &[], |_| Control::Continue)?;
    Ok((z1.rows(0, d).into_owned(), DMatrix::from_column_slice(d, d, z1.rows(d, d * d).as_slice())))
}

/// Least-squares Newton on `φ_T(y) = y`, `(y − s)·ν = 0`, `j(y) = 1`.
fn polish<T: Float>(
    body: &ConvexBody<T>,
    seed: &DVector<T>,
    normal: &DVector<T>,
    y_init: &DVector<T>,
    t_init: T,
    scale: T,
) -> Result<(DVector<T>, T)> {
    let d = seed.len();
    let mut y = y_init.clone();
    let mut t = t_init;
    let target = lit::<T>(1e-12) * scale;
    let mut last = lit::<T>(f64::INFINITY);
    for _ in 0..MAX_NEWTON {
        let (end, phi) = flow_with_jacobian(body, &y, t)?;
        let gap = &end - &y;
        let jet = body.jet(&y)?;
        let mut res = DVector::zeros(d + 2);
        res.rows_mut(0, d).copy_from(&gap);
        res[d] = (&y - seed).dot(normal);
        res[d + 1] = jet.j - T::ONE;
        let size = res.norm();
        if size <= target {
            return Ok((y, t));
        }
        if size > last * lit(0.9) && size < target * lit(100.0) {
            // stagnated at round-off level
            return Ok((y, t));
        }
        last = size;
        let f_end = characteristic_field(body, &end)?;
        let mut jac = DMatrix::zeros(d + 2, d + 1);
        jac.view_mut((0, 0), (d, d)).copy_from(&(phi - DMatrix::identity(d, d)));
        jac.view_mut((0, d), (d, 1)).copy_from(&f_end);
        jac.view_mut((d, 0), (1, d)).copy_from(&normal.transpose());
        jac.view_mut((d + 1, 0), (1, d)).copy_from(&jet.grad.transpose());
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.iter().fold(T::ZERO, |a, &b| a.max(b));
        let step = svd
            .solve(&res, smax * lit(1e-10))
            .map_err(|e| Error::NoConvergence(e.to_string()))?;
        // cap the step to a tenth of the body's size
        let len = step.norm();
        let cap = scale * lit(0.1);
        let step = if len > cap { step * (cap / len) } else { step };
        y -= step.rows(0, d);
        t -= step[d];
        if !(t > T::ZERO) {
            return Err(Error::NoConvergence("period became non-positive".into()));
        }
    }
    Err(Error::NoConvergence(format!("return-map Newton stalled after {MAX_NEWTON} iterations")))
}

/// Integrates from `seed` (projected to Σ) until a return to the section
/// closes within the gate, then polishes by Newton. `None` when no return
/// closes before `t_max`.
pub fn shoot<T: Float>(body: &ConvexBody<T>, seed: &DVector<T>, opts: &ShootOptions) -> Result<ShootReport<T>> {
    let g = body.gauge(seed)?;
    if !(g > T::ZERO) {
        return Err(Error::Precondition("seed at the origin".into()));
    }
    let y0 = seed / g;
    let (_, rmax2) = body.radius_bounds()?;
    let diameter = T::TWO * rmax2.sqrt();
    let normal = {
        let f = characteristic_field(body, &y0)?;
        &f / f.norm()
    };
    let field = |_t: T, y: &DVector<T>| characteristic_field(body, y);
    let gate = lit::<T>(opts.gate) * diameter;
    let mut report = ShootReport {
        orbit: None,
        returns: 0,
        best_gap: f64::INFINITY,
        energy_drift: 0.0,
        newton_failures: Vec::new(),
    };
    let mut candidates: Vec<(DVector<T>, T)> = Vec::new();
    let mut left = false;
    let mut drift = T::ZERO;
    let mut err: Option<Error> = None;
    integrator().integrate(&field, T::ZERO, &y0, lit(opts.t_max), &[], |s| {
        match body.gauge(s.y1) {
            Ok(v) => drift = drift.max((v - T::ONE).abs()),
            Err(e) => {
                err = Some(e);
                return Control::Stop;
            }
        }
        let h0 = (s.y0 - &y0).dot(&normal);
        let h1 = (s.y1 - &y0).dot(&normal);
        if h1 < T::ZERO {
            left = true;
        }
        if left && h0 < T::ZERO && h1 >= T::ZERO {
            // bisection on the Hermite interpolant
            let (mut lo, mut hi) = (s.t0, s.t1);
            for _ in 0..80 {
                let mid = (lo + hi) * T::HALF;
                if (s.hermite(mid) - &y0).dot(&normal) < T::ZERO {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let tc = (lo + hi) * T::HALF;
            let yc = s.hermite(tc);
            let gap = (&yc - &y0).norm();
            candidates.push((yc, tc));
            let rel = (gap / diameter).to_f64_lossy();
            if rel < opts.gate {
                return Control::Stop;
            }
            left = false;
        }
        Control::Continue
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    report.energy_drift = drift.to_f64_lossy();
    report.returns = candidates.len();
    for (yc, tc) in &candidates {
        let gap = (yc - &y0).norm();
        report.best_gap = report.best_gap.min((gap / diameter).to_f64_lossy());
        if gap >= gate {
            continue;
        }
        match polish(body, &y0, &normal, &y0, *tc, diameter) {
            Ok((y, tau)) => {
                if (&y - &y0).norm() > gate * lit(10.0) {
                    report.newton_failures.push("Newton left the neighbourhood of the seed".into());
                    continue;
                }
                let samples = opts.samples.max(8);
                let times: Vec<T> = (0..=samples).map(|k| tau * T::nat(k) / T::nat(samples)).collect();
                let pts = integrator().solve_at(&field, T::ZERO, &y, &times)?;
                let orbit = ClosedCharacteristic::from_samples(body, tau, pts, OrbitSource::Shooting, 1)?;
                orbit.validate(body, opts.close_tol)?;
                report.orbit = Some(orbit);
                return Ok(report);
            }
            Err(e) => report.newton_failures.push(e.to_string()),
        }
    }
    Ok(report)
}
