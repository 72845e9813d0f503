//! Hamiltonians `H_a = aφ(j(x))` and `H_α = j(x)^α`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::body::ConvexBody;
use crate::geometry::phi::PhiFunction;
use crate::geometry::sampling::{directions, DIRECTIONS, SHELLS};
use crate::scalar::{lit, Float};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", bound(serialize = "", deserialize = ""))]
pub enum HamiltonianForm<T: Float> {
    Scaled { a: T, phi: PhiFunction<T> },
    PureHomogeneous { alpha: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianModel<T: Float> {
    pub body: ConvexBody<T>,
    pub form: HamiltonianForm<T>,
}

/// `H(x)` with gradient, and Hessian when requested.
#[derive(Debug, Clone)]
pub struct HamiltonianJet<T: Float> {
    pub value: T,
    pub grad: DVector<T>,
    pub hess: Option<DMatrix<T>>,
}

/// Sampled bounds `r|ξ|² ≤ H″ξ·ξ ≤ R|ξ|²` and quadratic growth constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelBounds {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub eps1: f64,
    pub eps2: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl<T: Float> HamiltonianModel<T> {
    pub fn scaled(body: ConvexBody<T>, a: T, phi: PhiFunction<T>) -> Result<Self> {
        if !(a > T::ZERO) {
            return Err(Error::Range("a must be positive".into()));
        }
        Ok(Self { body, form: HamiltonianForm::Scaled { a, phi } })
    }

    pub fn homogeneous(body: ConvexBody<T>, alpha: T) -> Result<Self> {
        if !(alpha > T::ONE && alpha < T::TWO) {
            return Err(Error::Range(format!("alpha = {alpha:e} outside (1, 2)")));
        }
        Ok(Self { body, form: HamiltonianForm::PureHomogeneous { alpha } })
    }

    pub fn n(&self) -> usize {
        self.body.n()
    }

    /// `(φ(λ), φ′(λ), φ″(λ))` of the radial profile, including the factor `a`.
    pub fn radial(&self, lam: T) -> [T; 3] {
        match &self.form {
            HamiltonianForm::Scaled { a, phi } => {
                let [v, d, s] = phi.eval(lam);
                [*a * v, *a * d, *a * s]
            }
            HamiltonianForm::PureHomogeneous { alpha } => {
                if lam == T::ZERO {
                    return [T::ZERO, T::ZERO, T::ZERO];
                }
                let p = lam.powf(*alpha - T::TWO);
                [p * lam * lam, *alpha * p * lam, *alpha * (*alpha - T::ONE) * p]
            }
        }
    }

    pub fn value(&self, x: &DVector<T>) -> Result<T> {
        let lam = self.body.gauge(x)?;
        Ok(self.radial(lam)[0])
    }

    pub fn eval(&self, x: &DVector<T>, with_hessian: bool) -> Result<HamiltonianJet<T>> {
        let zero = x.iter().all(|v| *v == T::ZERO);
        if zero {
            if with_hessian {
                return Err(Error::SingularPoint);
            }
            return Ok(HamiltonianJet { value: T::ZERO, grad: DVector::zeros(x.len()), hess: None });
        }
        let g = self.body.jet(x)?;
        let [v, d, s] = self.radial(g.j);
        let grad = &g.grad * d;
        let hess = if with_hessian {
            Some(&g.grad * g.grad.transpose() * s + &g.hess * d)
        } else {
            None
        };
        Ok(HamiltonianJet { value: v, grad, hess })
    }

    pub fn hamiltonian_eval(&self, x: &DVector<T>) -> Result<(T, DVector<T>, DMatrix<T>)> {
        let h = self.eval(x, true)?;
        Ok((h.value, h.grad, h.hess.unwrap()))
    }

    /// Sampled Hessian bounds over `DIRECTIONS` directions on several shells.
    /// Growth constants are reported for the scaled form only.
    pub fn bounds(&self) -> Result<ModelBounds> {
        let dim = 2 * self.n();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let radii: Vec<f64> = match &self.form {
            HamiltonianForm::Scaled { phi, .. } => {
                let t = phi.t_splice.to_f64_lossy();
                vec![0.1, 0.5, 1.0, 0.5 * (1.0 + t), t, 2.0 * t, 10.0 * t]
            }
            HamiltonianForm::PureHomogeneous { .. } => SHELLS.to_vec(),
        };
        for d in directions::<T>(dim, DIRECTIONS, 3) {
            let y = self.body.project(&d)?;
            for &s in &radii {
                let x = &y * lit::<T>(s);
                let h = self.eval(&x, true)?.hess.unwrap();
                let ev = h.symmetric_eigenvalues();
                for e in ev.iter() {
                    lo = lo.min(e.to_f64_lossy());
                    hi = hi.max(e.to_f64_lossy());
                }
            }
        }
        if !(lo > 0.0) {
            return Err(Error::InvariantViolation(format!("Hessian lower bound {lo:e} is not positive")));
        }
        let (mut eps1, mut eps2, mut c) = (f64::NAN, f64::NAN, f64::NAN);
        if let HamiltonianForm::Scaled { a, phi } = &self.form {
            let (smin, smax) = self.body.radius_bounds()?;
            let (smin, smax) = (smin.to_f64_lossy(), smax.to_f64_lossy());
            let a = a.to_f64_lossy();
            let d2 = phi.tail_d2().to_f64_lossy();
            eps1 = a * d2 / smax;
            eps2 = 0.5 * (2.0 * a * d2 / smin + 0.5);
            // C = sup over λ of the deviation from the two quadratic envelopes
            let mut sup = 0.0f64;
            let top = 20.0 * phi.t_splice.to_f64_lossy();
            for k in 0..=20000 {
                let lam = top * k as f64 / 20000.0;
                let h = a * phi.value(lit::<T>(lam)).to_f64_lossy();
                sup = sup.max(0.5 * eps1 * lam * lam * smax - h);
                sup = sup.max(h - 0.5 * eps2 * lam * lam * smin);
            }
            c = sup;
        }
        Ok(ModelBounds { r: lo, big_r: hi, eps1, eps2, c })
    }
}
