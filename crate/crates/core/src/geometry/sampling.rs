//! Deterministic sample sets and construction-time validation of bodies.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::body::ConvexBody;
use crate::scalar::{lit, Float};

/// `count` unit vectors in ℝ^dim from a fixed-seed generator.
pub fn directions<T: Float>(dim: usize, count: usize, seed: u64) -> Vec<DVector<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v = DVector::<f64>::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
            let v = &v / v.norm();
            v.map(lit::<T>)
        })
        .collect()
}

/// Shell radii used for sampled checks.
pub const SHELLS: [f64; 3] = [0.5, 1.0, 2.0];
pub const DIRECTIONS: usize = 200;

/// Worst observed defects of the gauge invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyReport {
    pub homogeneity: f64,
    pub euler: f64,
    pub radial_hessian: f64,
    /// Smallest eigenvalue of `j″` restricted to the tangent space at `Σ`.
    pub tangent_convexity: f64,
}

/// Orthonormal basis of `{v : a·v = 0}`.
pub fn complement<T: Float>(a: &DVector<T>) -> DMatrix<T> {
    let dim = a.len();
    let u = a / a.norm();
    let mut cols: Vec<DVector<T>> = Vec::new();
    for i in 0..dim {
        let mut e = DVector::zeros(dim);
        e[i] = T::ONE;
        let mut v = &e - &u * u.dot(&e);
        for c in &cols {
            v -= c * c.dot(&v);
        }
        let nv = v.norm();
        if nv > lit(1e-6) {
            cols.push(v / nv);
        }
        if cols.len() == dim - 1 {
            break;
        }
    }
    DMatrix::from_columns(&cols)
}

/// Checks homogeneity, the Euler identity, `j″(y)y = 0` and strict convexity
/// on `DIRECTIONS` directions per shell.
pub fn validate_body<T: Float>(body: &ConvexBody<T>) -> Result<BodyReport> {
    let dim = 2 * body.n();
    let mut rep = BodyReport { homogeneity: 0.0, euler: 0.0, radial_hessian: 0.0, tangent_convexity: f64::INFINITY };
    for d in directions::<T>(dim, DIRECTIONS, 7) {
        let base = body.gauge(&d)?;
        let y = &d / base;
        let gy = body.jet(&y)?;
        let pd = gy.hess.norm();
        let ry = (&gy.hess * &y).norm() / pd.max(T::ONE);
        rep.radial_hessian = rep.radial_hessian.max(ry.to_f64_lossy());
        let basis = complement(&gy.grad);
        let restricted = basis.transpose() * &gy.hess * &basis;
        let ev = restricted.symmetric_eigenvalues();
        let lo = ev.iter().fold(f64::INFINITY, |a, v| a.min(v.to_f64_lossy()));
        rep.tangent_convexity = rep.tangent_convexity.min(lo);
        for &s in &SHELLS {
            let x = &d * lit::<T>(s);
            let g = body.jet(&x)?;
            let h = ((g.j - lit::<T>(s) * base) / g.j).abs();
            rep.homogeneity = rep.homogeneity.max(h.to_f64_lossy());
            let e = ((g.grad.dot(&x) - g.j) / g.j).abs();
            rep.euler = rep.euler.max(e.to_f64_lossy());
        }
    }
    let eps = if std::mem::size_of::<T>() == 4 { 1e-4 } else { 1e-9 };
    if rep.homogeneity > eps || rep.euler > eps {
        return Err(Error::InvariantViolation(format!(
            "gauge homogeneity/Euler defect {:e}/{:e}",
            rep.homogeneity, rep.euler
        )));
    }
    if !(rep.tangent_convexity > 0.0) {
        return Err(Error::InvariantViolation("body is not strictly convex on the samples".into()));
    }
    Ok(rep)
}
