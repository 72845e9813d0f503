//! Closed-form orbits on ellipsoids.

use nalgebra::DVector;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::index::rational::detect_rational;
use crate::orbit::characteristic::{ClosedCharacteristic, OrbitSource};
use crate::scalar::Float;

/// Period `2π r_j²` of the circle in coordinate plane `j`.
pub fn ellipsoid_period<T: Float>(r: T) -> T {
    T::two_pi() * r * r
}

/// The `n` planar circles `y_j(t) = r_j(cos(t/r_j²) e_j + sin(t/r_j²) e_{j+n})`.
/// Refuses when some ratio `r_j²/r_k²` is detected rational: orbits then come
/// in continuous families.
pub fn ellipsoid_orbits<T: Float>(
    body: &ConvexBody<T>,
    samples: usize,
    tol: &Tolerances,
) -> Result<Vec<ClosedCharacteristic<T>>> {
    let r = body
        .semi_axes()
        .ok_or_else(|| Error::Precondition("closed-form orbits need an ellipsoid".into()))?;
    let n = r.len();
    for j in 0..n {
        for k in j + 1..n {
            let ratio = (r[j] * r[j] / (r[k] * r[k])).to_f64_lossy();
            if let Some((p, q)) = detect_rational(ratio, tol.q_max, tol.rational_tol) {
                return Err(Error::FamilyDegeneracy { j, k, p, q: q as i64 });
            }
        }
    }
    let samples = samples.max(8);
    (0..n)
        .map(|j| {
            let rj = r[j];
            let tau = ellipsoid_period(rj);
            let points: Vec<DVector<T>> = (0..=samples)
                .map(|k| {
                    let phase = T::two_pi() * T::nat(k % samples) / T::nat(samples);
                    let (s, c) = phase.sin_cos();
                    let mut y = DVector::zeros(2 * n);
                    y[j] = rj * c;
                    y[j + n] = rj * s;
                    y
                })
                .collect();
            ClosedCharacteristic::from_samples(body, tau, points, OrbitSource::Analytic, 1)
        })
        .collect()
}
