//! Fenchel dual `G = H*` of a Hamiltonian model.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::hamiltonian::{HamiltonianForm, HamiltonianModel};
use crate::scalar::Float;

/// Evaluator for `G(y) = sup_x (x·y − H(x))`.
#[derive(Debug, Clone)]
pub struct FenchelDual<T: Float> {
    pub source: HamiltonianModel<T>,
}

/// `G(y)`, `G′(y)` and optionally `G″(y)`.
#[derive(Debug, Clone)]
pub struct DualJet<T: Float> {
    pub value: T,
    pub grad: DVector<T>,
    pub hess: Option<DMatrix<T>>,
}

pub fn fenchel<T: Float>(hm: &HamiltonianModel<T>) -> FenchelDual<T> {
    FenchelDual { source: hm.clone() }
}

impl<T: Float> FenchelDual<T> {
    /// Conjugate exponent `β = α/(α−1)` for the homogeneous form.
    pub fn beta(&self) -> Option<T> {
        match &self.source.form {
            HamiltonianForm::PureHomogeneous { alpha } => Some(*alpha / (*alpha - T::ONE)),
            HamiltonianForm::Scaled { .. } => None,
        }
    }

    /// `c₁` in `G(μ j′(z)) = c₁ μ^β`.
    pub fn c1(&self) -> Option<T> {
        match &self.source.form {
            HamiltonianForm::PureHomogeneous { alpha } => {
                let beta = *alpha / (*alpha - T::ONE);
                Some((*alpha - T::ONE) * alpha.powf(-beta))
            }
            HamiltonianForm::Scaled { .. } => None,
        }
    }

    /// Writes `y = μ j′(ξ)` with `ξ ∈ Σ`, `μ = h(y)`, and recovers the radius `λ`
    /// of the primal point `x = λξ` from `φ′(λ) = μ`.
    pub fn eval(&self, y: &DVector<T>, with_hessian: bool) -> Result<DualJet<T>> {
        if y.iter().all(|v| *v == T::ZERO) {
            if with_hessian {
                return Err(Error::SingularPoint);
            }
            return Ok(DualJet { value: T::ZERO, grad: DVector::zeros(y.len()), hess: None });
        }
        let (mu, xi) = self.source.body.support(y)?;
        let lam = match &self.source.form {
            HamiltonianForm::Scaled { a, phi } => phi.inverse_d1(mu / *a)?,
            HamiltonianForm::PureHomogeneous { alpha } => (mu / *alpha).powf(T::ONE / (*alpha - T::ONE)),
        };
        let value = match &self.source.form {
            HamiltonianForm::PureHomogeneous { .. } => self.c1().unwrap() * mu.powf(self.beta().unwrap()),
            HamiltonianForm::Scaled { .. } => lam * mu - self.source.radial(lam)[0],
        };
        let x = &xi * lam;
        let hess = if with_hessian {
            let h = self.source.eval(&x, true)?.hess.unwrap();
            let inv = h
                .try_inverse()
                .ok_or_else(|| Error::DualDomain("primal Hessian is singular".into()))?;
            Some((&inv + inv.transpose()) * T::HALF)
        } else {
            None
        };
        Ok(DualJet { value, grad: x, hess })
    }

    pub fn value(&self, y: &DVector<T>) -> Result<T> {
        Ok(self.eval(y, false)?.value)
    }

    pub fn grad(&self, y: &DVector<T>) -> Result<DVector<T>> {
        Ok(self.eval(y, false)?.grad)
    }
}
