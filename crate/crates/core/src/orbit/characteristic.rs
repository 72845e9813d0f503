//! Closed characteristics `(τ, y)` of `ẏ = J N_Σ(y)` and their sampled form.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::linalg::apply_j;
use crate::scalar::{lit, Float};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitSource {
    Analytic,
    Shooting,
    DualAction,
}

/// Uniformly sampled closed characteristic. `points` has `samples + 1`
/// entries with the last one at `t = τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCharacteristic<T: Float> {
    pub tau: T,
    pub times: Vec<T>,
    pub points: Vec<DVector<T>>,
    pub velocities: Vec<DVector<T>>,
    pub multiplicity: usize,
    pub source: OrbitSource,
    pub residual: T,
}

/// `J j′(y)`, the characteristic vector field.
pub fn characteristic_field<T: Float>(body: &ConvexBody<T>, y: &DVector<T>) -> Result<DVector<T>> {
    Ok(apply_j(&body.jet(y)?.grad))
}

/// Trigonometric-interpolation derivative of a uniformly sampled periodic
/// signal (one period, without the repeated endpoint).
pub fn spectral_derivative<T: Float>(tau: T, pts: &[DVector<T>]) -> Vec<DVector<T>> {
    let n = pts.len();
    let dim = pts[0].len();
    let two_pi = T::two_pi();
    let half = n / 2;
    let mut re = vec![DVector::<T>::zeros(dim); half + 1];
    let mut im = vec![DVector::<T>::zeros(dim); half + 1];
    let cs: Vec<(T, T)> = (0..n)
        .map(|k| {
            let a = two_pi * T::nat(k) / T::nat(n);
            (a.cos(), a.sin())
        })
        .collect();
    for m in 1..=half {
        for (k, p) in pts.iter().enumerate() {
            let (c, s) = cs[(m * k) % n];
            re[m].axpy(c, p, T::ONE);
            im[m].axpy(-s, p, T::ONE);
        }
    }
    let nyquist = n % 2 == 0;
    (0..n)
        .map(|k| {
            let mut d = DVector::zeros(dim);
            for m in 1..=half {
                if nyquist && m == half {
                    continue;
                }
                let (c, s) = cs[(m * k) % n];
                // derivative of 2 Re(c_m e^{iωmt}) with c_m = (re + i im)/n
                let w = two_pi * T::nat(m) / tau * T::TWO / T::nat(n);
                d.axpy(-w * s, &re[m], T::ONE);
                d.axpy(-w * c, &im[m], T::ONE);
            }
            d
        })
        .collect()
}

impl<T: Float> ClosedCharacteristic<T> {
    /// Builds an orbit from uniform samples on `[0, τ]` (endpoint included),
    /// computing velocities from the body and the spectral residual.
    pub fn from_samples(
        body: &ConvexBody<T>,
        tau: T,
        points: Vec<DVector<T>>,
        source: OrbitSource,
        multiplicity: usize,
    ) -> Result<Self> {
        if points.len() < 8 {
            return Err(Error::Precondition("an orbit needs at least 8 samples".into()));
        }
        let samples = points.len() - 1;
        let times: Vec<T> = (0..=samples).map(|k| tau * T::nat(k) / T::nat(samples)).collect();
        let velocities = points
            .iter()
            .map(|y| characteristic_field(body, y))
            .collect::<Result<Vec<_>>>()?;
        let deriv = spectral_derivative(tau, &points[..samples]);
        let residual = deriv
            .iter()
            .zip(&velocities)
            .map(|(d, v)| (d - v).norm())
            .fold(T::ZERO, |a, b| a.max(b));
        Ok(Self { tau, times, points, velocities, multiplicity, source, residual })
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn start(&self) -> &DVector<T> {
        &self.points[0]
    }

    pub fn samples(&self) -> usize {
        self.points.len() - 1
    }

    /// Hermite interpolation on the periodic extension.
    pub fn point_at(&self, t: T) -> DVector<T> {
        let t = crate::scalar::rem_euclid(t, self.tau);
        let h = self.tau / T::nat(self.samples());
        let k = ((t / h).floor().to_f64_lossy() as usize).min(self.samples() - 1);
        let s = (t - self.times[k]) / h;
        hermite(&self.points[k], &self.velocities[k], &self.points[k + 1], &self.velocities[k + 1], h, s)
    }

    /// Largest of `|j(y) − 1|` over the samples.
    pub fn level_defect(&self, body: &ConvexBody<T>) -> Result<T> {
        let mut worst = T::ZERO;
        for p in &self.points {
            worst = worst.max((body.gauge(p)? - T::ONE).abs());
        }
        Ok(worst)
    }

    /// `|y(τ) − y(0)| / max|y|`.
    pub fn closure_defect(&self) -> T {
        let scale = self.points.iter().map(|p| p.norm()).fold(T::ZERO, |a, b| a.max(b));
        (self.points.last().unwrap() - &self.points[0]).norm() / scale.max(T::EPS)
    }

    /// Checks the level, closure and residual invariants.
    pub fn validate(&self, body: &ConvexBody<T>, close_tol: f64) -> Result<()> {
        let level = self.level_defect(body)?;
        if level > lit(1e-8) {
            return Err(Error::InvariantViolation(format!("orbit leaves Σ: |j − 1| = {:e}", level.to_f64_lossy())));
        }
        let c = self.closure_defect();
        if c > lit(close_tol) {
            return Err(Error::InvariantViolation(format!("orbit does not close: {:e}", c.to_f64_lossy())));
        }
        if self.residual > lit(1e-7) {
            return Err(Error::InvariantViolation(format!(
                "orbit residual {:e} exceeds 1e-7",
                self.residual.to_f64_lossy()
            )));
        }
        Ok(())
    }

    /// Largest pairwise distance between samples.
    pub fn diameter(&self) -> T {
        let mut d = T::ZERO;
        let pts = &self.points[..self.samples()];
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Sample rows `[t, y…]` for JSON output.
    pub fn sample_rows(&self) -> Vec<Vec<f64>> {
        self.times
            .iter()
            .zip(&self.points)
            .map(|(t, p)| std::iter::once(t.to_f64_lossy()).chain(p.iter().map(|v| v.to_f64_lossy())).collect())
            .collect()
    }
}

pub(crate) fn hermite<T: Float>(
    y0: &DVector<T>,
    v0: &DVector<T>,
    y1: &DVector<T>,
    v1: &DVector<T>,
    h: T,
    s: T,
) -> DVector<T> {
    let s2 = s * s;
    let s3 = s2 * s;
    let three = lit::<T>(3.0);
    let h00 = T::TWO * s3 - three * s2 + T::ONE;
    let h10 = s3 - T::TWO * s2 + s;
    let h01 = -T::TWO * s3 + three * s2;
    let h11 = s3 - s2;
    y0 * h00 + v0 * (h10 * h) + y1 * h01 + v1 * (h11 * h)
}

/// Serialized orbit: `{tau, samples: [[t, y…]…], source, residual, multiplicity}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitJson {
    pub tau: f64,
    pub samples: Vec<Vec<f64>>,
    pub source: OrbitSource,
    pub residual: f64,
    pub multiplicity: usize,
}

impl<T: Float> From<&ClosedCharacteristic<T>> for OrbitJson {
    fn from(o: &ClosedCharacteristic<T>) -> Self {
        Self {
            tau: o.tau.to_f64_lossy(),
            samples: o.sample_rows(),
            source: o.source,
            residual: o.residual.to_f64_lossy(),
            multiplicity: o.multiplicity,
        }
    }
}

impl OrbitJson {
    /// Rebuilds the orbit on `body`; velocities and residual are recomputed.
    pub fn to_orbit<T: Float>(&self, body: &ConvexBody<T>) -> Result<ClosedCharacteristic<T>> {
        let dim = 2 * body.n();
        let points = self
            .samples
            .iter()
            .map(|row| {
                if row.len() != dim + 1 {
                    return Err(Error::Dimension(format!("orbit sample of length {}, expected {}", row.len(), dim + 1)));
                }
                Ok(DVector::from_iterator(dim, row[1..].iter().map(|&v| lit::<T>(v))))
            })
            .collect::<Result<Vec<_>>>()?;
        ClosedCharacteristic::from_samples(body, lit(self.tau), points, self.source, self.multiplicity)
    }
}
