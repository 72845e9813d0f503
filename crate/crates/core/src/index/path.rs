use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{lit, Float};
use crate::symplectic::{diamond, SymplecticMatrix};

/// A sampled path γ: [0, τ] → Sp(2n) with γ(0) = I.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticPath<T: Float> {
    n: usize,
    tau: T,
    times: Vec<T>,
    mats: Vec<SymplecticMatrix<T>>,
}

impl<T: Float> SymplecticPath<T> {
    /// `resolution` bounds the largest sample gap relative to τ.
    pub fn new(times: Vec<T>, mats: Vec<SymplecticMatrix<T>>, tol_symp: f64, resolution: f64) -> Result<Self> {
        if times.len() != mats.len() || times.len() < 2 {
            return Err(Error::Dimension("a path needs at least two samples with matching times".into()));
        }
        let n = mats[0].n();
        if mats.iter().any(|m| m.n() != n) {
            return Err(Error::Dimension("samples of different dimensions".into()));
        }
        if times[0] != T::ZERO {
            return Err(Error::Precondition("path must start at t = 0".into()));
        }
        let tau = *times.last().unwrap();
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("sample times must increase strictly".into()));
        }
        let gap = times.windows(2).map(|w| w[1] - w[0]).fold(T::ZERO, |a, b| a.max(b));
        if gap > lit::<T>(resolution) * tau {
            return Err(Error::Precondition(format!(
                "largest sample gap {:e} exceeds {resolution} of the period",
                gap.to_f64_lossy()
            )));
        }
        let start = linalg::max_abs(&(mats[0].matrix() - DMatrix::identity(2 * n, 2 * n)));
        if start > lit(tol_symp) {
            return Err(Error::Precondition(format!("path must start at I (defect {:e})", start.to_f64_lossy())));
        }
        Ok(Self { n, tau, times, mats })
    }

    pub(crate) fn new_unchecked(times: Vec<T>, mats: Vec<SymplecticMatrix<T>>) -> Self {
        let n = mats[0].n();
        let tau = *times.last().unwrap();
        Self { n, tau, times, mats }
    }

    /// Samples `f` at `samples + 1` uniform times on `[0, τ]`.
    pub fn from_fn(tau: T, samples: usize, f: impl Fn(T) -> SymplecticMatrix<T>) -> Self {
        let samples = samples.max(1);
        let times: Vec<T> = (0..=samples)
            .map(|k| tau * T::nat(k) / T::nat(samples))
            .collect();
        let mats = times.iter().map(|&t| f(t)).collect();
        Self::new_unchecked(times, mats)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn matrices(&self) -> &[SymplecticMatrix<T>] {
        &self.mats
    }

    pub fn endpoint(&self) -> &SymplecticMatrix<T> {
        self.mats.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// Conjugates every sample by `p`; the path still starts at I.
    pub fn conjugate_by(&self, p: &SymplecticMatrix<T>) -> Self {
        let pi = p.inverse();
        let mats = self.mats.iter().map(|m| pi.mul(m).mul(p)).collect();
        Self::new_unchecked(self.times.clone(), mats)
    }

    /// Pointwise ⋄-product of two paths on the same time grid.
    pub fn diamond(&self, other: &Self) -> Result<Self> {
        if self.times != other.times {
            return Err(Error::Dimension("⋄-product of paths needs a common time grid".into()));
        }
        let mats = self.mats.iter().zip(&other.mats).map(|(a, b)| diamond(a, b)).collect();
        Ok(Self::new_unchecked(self.times.clone(), mats))
    }

    /// Reparametrizes time linearly so the path lives on `[0, tau]`.
    pub fn rescaled(&self, tau: T) -> Self {
        let s = tau / self.tau;
        let times = self.times.iter().map(|&t| t * s).collect();
        Self::new_unchecked(times, self.mats.clone())
    }
}

/// The m-th iteration `γᵐ(t) = γ(t − jτ) γ(τ)^j` on `[0, mτ]`.
pub fn iterate_path<T: Float>(gamma: &SymplecticPath<T>, m: usize) -> SymplecticPath<T> {
    let m = m.max(1);
    let end = gamma.endpoint().clone();
    let mut times = gamma.times.clone();
    let mut mats = gamma.mats.clone();
    let mut power = end.clone();
    for j in 1..m {
        let shift = gamma.tau * T::nat(j);
        for (t, g) in gamma.times.iter().zip(&gamma.mats).skip(1) {
            times.push(*t + shift);
            mats.push(g.mul(&power));
        }
        power = power.mul(&end);
    }
    SymplecticPath::new_unchecked(times, mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{realize, BasicNormalForm};

    fn rotation_path(theta: f64) -> SymplecticPath<f64> {
        SymplecticPath::from_fn(1.0, 32, |t| {
            if t == 0.0 {
                SymplecticMatrix::identity(1)
            } else {
                let a = (t * theta).rem_euclid(std::f64::consts::TAU);
                let a = if a == 0.0 || a == std::f64::consts::PI { a + 1e-300 } else { a };
                realize(&BasicNormalForm::R { theta: a }).unwrap()
            }
        })
    }

    #[test]
    fn iterate_once_is_identity_operation() {
        let g = rotation_path(2.0);
        assert_eq!(iterate_path(&g, 1), g);
    }

    #[test]
    fn iterate_rotation_group_law() {
        let g = rotation_path(2.0);
        let g2 = iterate_path(&g, 2);
        assert_eq!(g2.tau(), 2.0);
        let r = realize(&BasicNormalForm::R { theta: 4.0 }).unwrap();
        assert!(linalg::max_abs(&(g2.endpoint().matrix() - r.matrix())) < 1e-14);
    }

    #[test]
    fn constructor_rejects_bad_paths() {
        let i = SymplecticMatrix::<f64>::identity(1);
        let r = realize(&BasicNormalForm::R { theta: 0.5 }).unwrap();
        assert!(SymplecticPath::new(vec![0.0, 1.0], vec![i.clone(), r.clone()], 1e-10, 1.0).is_ok());
        assert!(SymplecticPath::new(vec![0.0, 1.0], vec![r.clone(), i.clone()], 1e-10, 1.0).is_err());
        assert!(SymplecticPath::new(vec![0.0, 0.0], vec![i.clone(), r.clone()], 1e-10, 1.0).is_err());
        assert!(SymplecticPath::new(vec![0.0, 1.0], vec![i, r], 1e-10, 0.5).is_err());
    }
}
