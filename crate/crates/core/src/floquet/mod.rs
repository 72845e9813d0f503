//! Linearized flow along an orbit: monodromy, Floquet multipliers, stability.

use std::fmt;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{HamiltonianForm, HamiltonianModel};
use crate::index::path::SymplecticPath;
use crate::index::rational::detect_rational;
use crate::linalg::{apply_j, j_matrix, symplectic_defect, symplectic_project};
use crate::ode::{Control, Dop853};
use crate::orbit::ClosedCharacteristic;
use crate::scalar::{lit, Float};
use crate::symplectic::{spectrum, MatrixJson, Spectrum, SymplecticMatrix};

/// Output segments between forced re-symplectifications.
pub const PROJECT_EVERY: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityKind {
    Hyperbolic,
    Elliptic,
    IrrationallyElliptic,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub degenerate: bool,
    pub kind: StabilityKind,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = if self.degenerate { "degenerate" } else { "non-degenerate" };
        let k = match self.kind {
            StabilityKind::Hyperbolic => "hyperbolic",
            StabilityKind::Elliptic => "elliptic",
            StabilityKind::IrrationallyElliptic => "irrationally-elliptic",
            StabilityKind::Mixed => "mixed",
        };
        write!(f, "{d} {k}")
    }
}

/// Linearization of an orbit of `ẋ = JH′(x)`.
#[derive(Debug, Clone)]
pub struct MonodromyData<T: Float> {
    /// Period of the Hamiltonian orbit (differs from the characteristic's τ).
    pub period: T,
    /// Radius `ρ` of the rescaled orbit `x = ρ y(τ t)`; 1 for the homogeneous form.
    pub rho: T,
    pub x0: DVector<T>,
    pub xdot0: DVector<T>,
    pub path: SymplecticPath<T>,
    pub spectrum: Spectrum<T>,
    pub classification: Classification,
    pub warnings: Vec<String>,
}

impl<T: Float> MonodromyData<T> {
    pub fn monodromy(&self) -> &SymplecticMatrix<T> {
        self.path.endpoint()
    }

    /// Algebraic multiplicity of the multiplier 1.
    pub fn multiplicity_at_one(&self) -> usize {
        self.spectrum.circle.algebraic_at_one()
    }
}

/// Start point and period of the Hamiltonian orbit corresponding to `(τ, y)`:
/// `x(t) = y(αt)` for `j^α`, `x(t) = ρ y(τt)` with `aφ′(ρ) = ρτ` for `aφ(j)`.
pub fn hamiltonian_orbit<T: Float>(hm: &HamiltonianModel<T>, orbit: &ClosedCharacteristic<T>) -> Result<(DVector<T>, T, T)> {
    let y0 = orbit.start().clone();
    match &hm.form {
        HamiltonianForm::PureHomogeneous { alpha } => Ok((y0, orbit.tau / *alpha, T::ONE)),
        HamiltonianForm::Scaled { a, phi } => {
            let target = orbit.tau / *a;
            if !(target < T::ONE && target > phi.asymptotic_slope()) {
                return Err(Error::Precondition(format!(
                    "period {:e} outside the window of H_a with a = {:e}",
                    orbit.tau.to_f64_lossy(),
                    a.to_f64_lossy()
                )));
            }
            // φ′(ρ)/ρ decreases from 1 to its asymptotic slope
            let f = |r: T| phi.d1(r) / r - target;
            let mut lo = lit::<T>(1e-12);
            let mut hi = T::ONE;
            while f(hi) > T::ZERO {
                hi *= T::TWO;
            }
            for _ in 0..200 {
                let mid = (lo + hi) * T::HALF;
                if f(mid) > T::ZERO {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= T::EPS * hi * lit(4.0) {
                    break;
                }
            }
            let rho = (lo + hi) * T::HALF;
            Ok((y0 * rho, T::ONE, rho))
        }
    }
}

fn pack<T: Float>(x: &DVector<T>, phi: &DMatrix<T>) -> DVector<T> {
    let d = x.len();
    let mut z = DVector::zeros(d + d * d);
    z.rows_mut(0, d).copy_from(x);
    z.rows_mut(d, d * d).copy_from_slice(phi.as_slice());
    z
}

fn unpack<T: Float>(z: &DVector<T>, d: usize) -> (DVector<T>, DMatrix<T>) {
    let x = z.rows(0, d).into_owned();
    let phi = DMatrix::from_column_slice(d, d, z.rows(d, d * d).as_slice());
    (x, phi)
}

/// Integrates the orbit jointly with `Φ̇ = JH″(x)Φ`, re-symplectifying every
/// `PROJECT_EVERY` segments or when the defect exceeds `tol_symp/10`.
pub fn linearize<T: Float>(
    hm: &HamiltonianModel<T>,
    orbit: &ClosedCharacteristic<T>,
    samples: usize,
    tol: &Tolerances,
) -> Result<MonodromyData<T>> {
    if orbit.residual > lit(1e-7) {
        return Err(Error::Precondition(format!(
            "orbit residual {:e} above 1e-7",
            orbit.residual.to_f64_lossy()
        )));
    }
    let (x0, period, rho) = hamiltonian_orbit(hm, orbit)?;
    let d = x0.len();
    let n = d / 2;
    let j = j_matrix::<T>(n);
    let rhs = |_t: T, z: &DVector<T>| -> Result<DVector<T>> {
        let (x, phi) = unpack(z, d);
        let jet = hm.eval(&x, true)?;
        let jh = &j * jet.hess.unwrap();
        Ok(pack(&apply_j(&jet.grad), &(jh * phi)))
    };
    let samples = samples.max(8);
    let times: Vec<T> = (0..=samples).map(|k| period * T::nat(k) / T::nat(samples)).collect();
    let ode = Dop853::new(lit(1e-12), lit(1e-12));
    let id = DMatrix::<T>::identity(d, d);
    let mut mats = vec![SymplecticMatrix::identity(n)];
    let mut x = x0.clone();
    let mut phi = id.clone();
    let limit = lit::<T>(tol.tol_symp);
    for k in 0..samples {
        let z0 = pack(&x, &phi);
        let (_, z1, _) = ode.integrate(&rhs, times[k], &z0, times[k + 1], &[], |_| Control::Continue)?;
        let (x1, mut phi1) = unpack(&z1, d);
        let scale = phi1.norm_squared().max(T::ONE);
        if (k + 1) % PROJECT_EVERY == 0 || symplectic_defect(&phi1) > limit * lit(0.1) * scale {
            phi1 = symplectic_project(&phi1);
        }
        let defect = symplectic_defect(&phi1);
        if defect > limit * scale {
            return Err(Error::Integrator(format!(
                "symplectic drift {:e} after projection at t = {:e}",
                defect.to_f64_lossy(),
                times[k + 1].to_f64_lossy()
            )));
        }
        mats.push(SymplecticMatrix::new(phi1.clone(), tol.tol_symp)?);
        x = x1;
        phi = phi1;
    }
    let path = SymplecticPath::new(times, mats, tol.tol_symp, 1.0 / samples as f64 + 1e-12)?;
    let spectrum = spectrum(path.endpoint(), tol);
    let (classification, warnings) = classify_spectrum(path.endpoint(), &spectrum, tol);
    let xdot0 = apply_j(&hm.eval(&x0, false)?.grad);
    Ok(MonodromyData { period, rho, x0, xdot0, path, spectrum, classification, warnings })
}

/// Classification of a monodromy matrix with marginal-multiplier warnings.
pub fn classify_matrix<T: Float>(m: &SymplecticMatrix<T>, tol: &Tolerances) -> (Classification, Vec<String>) {
    let s = spectrum(m, tol);
    classify_spectrum(m, &s, tol)
}

pub fn classify<T: Float>(md: &MonodromyData<T>, tol: &Tolerances) -> Classification {
    classify_spectrum(md.monodromy(), &md.spectrum, tol).0
}

fn classify_spectrum<T: Float>(
    m: &SymplecticMatrix<T>,
    s: &Spectrum<T>,
    tol: &Tolerances,
) -> (Classification, Vec<String>) {
    let mut warnings = Vec::new();
    let tol_eig = tol.tol_eig;
    let cluster = tol.cluster_tol;
    // the forced Jordan pair at 1 splits like sqrt(error) and is not reported
    let forced = |z: &Complex<T>| {
        s.circle.algebraic_at_one() == 2 && ((z.re - T::ONE).to_f64_lossy().hypot(z.im.to_f64_lossy())) < cluster
    };
    for z in crate::linalg::eigenvalues(m.matrix()) {
        let dev = (z.norm_sqr().to_f64_lossy().sqrt() - 1.0).abs();
        if dev > tol_eig && dev < 100.0 * tol_eig && !forced(&z) {
            warnings.push(format!(
                "marginal multiplier {:.12}{:+.12}i with ||λ| − 1| = {dev:e}",
                z.re.to_f64_lossy(),
                z.im.to_f64_lossy()
            ));
        }
    }
    let at_one = s.circle.algebraic_at_one();
    let degenerate = at_one != 2;
    let others: Vec<_> = s
        .circle
        .eigenvalues
        .iter()
        .filter(|e| !(e.omega.im == T::ZERO && e.omega.re > T::ZERO))
        .collect();
    let kind = if s.off_circle.is_empty() {
        let irrational = !degenerate
            && others.iter().all(|e| {
                let frac = e.angle().to_f64_lossy() / std::f64::consts::TAU;
                detect_rational(frac, tol.q_max, tol.rational_tol).is_none()
            });
        if irrational {
            StabilityKind::IrrationallyElliptic
        } else {
            StabilityKind::Elliptic
        }
    } else if others.is_empty() && at_one == 2 {
        StabilityKind::Hyperbolic
    } else {
        StabilityKind::Mixed
    };
    (Classification { degenerate, kind }, warnings)
}

/// Residuals of the structure of `R(1)` along a rescaled orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentReport {
    /// `|R(1)ẋ(0) − ẋ(0)| / |ẋ(0)|`.
    pub fixed_vector: f64,
    /// Largest normal component of `R(1)v` over a unit basis `v` of `T_{y(0)}Σ`.
    pub tangent_invariance: f64,
    /// Coefficient of `ẋ(0)` in `R(1)x(0) − x(0)`.
    pub gamma: f64,
    /// `−(ρτ/a) d/dρ(ρ/φ′(ρ))`.
    pub gamma_expected: f64,
    /// Components of `R(1)x(0) − x(0) − γẋ(0)` outside `ẋ(0)`.
    pub gamma_remainder: f64,
    pub condition: f64,
    /// Action of `R(1)` on the tangent complement of `ẋ(0)`, in that basis.
    pub block: Vec<Vec<f64>>,
}

/// Checks `R(1)ẋ(0) = ẋ(0)`, `R(1)T_{y(0)}Σ ⊆ T_{y(0)}Σ` and extracts the shear
/// coefficient `γ` in the basis `(x(0), ẋ(0), tangent complement)`.
pub fn tangent_checks<T: Float>(
    md: &MonodromyData<T>,
    hm: &HamiltonianModel<T>,
    orbit_tau: T,
) -> Result<TangentReport> {
    let HamiltonianForm::Scaled { a, phi } = &hm.form else {
        return Err(Error::Precondition("tangent checks need the scaled Hamiltonian".into()));
    };
    let r1 = md.monodromy().matrix();
    let x0 = &md.x0;
    let v0 = &md.xdot0;
    let fixed = (r1 * v0 - v0).norm() / v0.norm();
    let y0 = x0 / md.rho;
    let normal = hm.body.jet(&y0)?.grad;
    let nn = normal.norm();
    let tangent = crate::geometry::sampling::complement(&normal);
    let mut inv = T::ZERO;
    for c in 0..tangent.ncols() {
        let w = r1 * tangent.column(c);
        inv = inv.max(normal.dot(&w).abs() / nn);
    }
    // complement of ẋ(0) inside the tangent space
    let d = x0.len();
    let mut cols: Vec<DVector<T>> = vec![x0.clone(), v0.clone()];
    let vhat = v0 / v0.norm();
    for c in 0..tangent.ncols() {
        let mut w = tangent.column(c).into_owned();
        w -= &vhat * vhat.dot(&w);
        for prev in cols.iter().skip(2) {
            w -= prev * prev.dot(&w);
        }
        let nw = w.norm();
        if nw > lit(1e-6) && cols.len() < d {
            cols.push(w / nw);
        }
    }
    let basis = DMatrix::from_columns(&cols);
    let sv = basis.clone().singular_values();
    let smax = sv.iter().fold(T::ZERO, |a, &b| a.max(b));
    let smin = sv.iter().fold(smax, |a, &b| a.min(b));
    let cond = (smax / smin).to_f64_lossy();
    if !(cond <= 1e8) {
        return Err(Error::Basis(cond));
    }
    let diff = r1 * x0 - x0;
    let lu = basis.lu();
    let coords = lu
        .solve(&diff)
        .ok_or(Error::Basis(f64::INFINITY))?;
    let gamma = coords[1];
    let remainder = coords
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != 1)
        .fold(T::ZERO, |m, (_, v)| m.max(v.abs()));
    let k = cols.len() - 2;
    let mut block = vec![vec![0.0; k]; k];
    for c in 0..k {
        let w = lu.solve(&(r1 * &cols[c + 2])).ok_or(Error::Basis(f64::INFINITY))?;
        for r in 0..k {
            block[r][c] = w[r + 2].to_f64_lossy();
        }
    }
    let rho = md.rho;
    let [_, d1, d2] = phi.eval(rho);
    let deriv = (d1 - rho * d2) / (d1 * d1);
    let expected = -(rho * orbit_tau / *a) * deriv;
    Ok(TangentReport {
        fixed_vector: fixed.to_f64_lossy(),
        tangent_invariance: inv.to_f64_lossy(),
        gamma: gamma.to_f64_lossy(),
        gamma_expected: expected.to_f64_lossy(),
        gamma_remainder: remainder.to_f64_lossy(),
        condition: cond,
        block,
    })
}

/// Monodromy JSON: matrix, multipliers, classification, tangent residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyJson {
    pub matrix: MatrixJson,
    /// `[re, im, algebraic, geometric]`; off-circle entries carry geometric 0.
    pub multipliers: Vec<[f64; 4]>,
    pub classification: String,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangent: Option<TangentReport>,
}

impl MonodromyJson {
    pub fn new<T: Float>(md: &MonodromyData<T>, tangent: Option<TangentReport>) -> Self {
        let mut multipliers: Vec<[f64; 4]> = md
            .spectrum
            .circle
            .eigenvalues
            .iter()
            .map(|e| [e.omega.re.to_f64_lossy(), e.omega.im.to_f64_lossy(), e.algebraic as f64, e.geometric as f64])
            .collect();
        for z in &md.spectrum.off_circle {
            multipliers.push([z.re.to_f64_lossy(), z.im.to_f64_lossy(), 1.0, 0.0]);
        }
        Self {
            matrix: MatrixJson::from(md.monodromy()),
            multipliers,
            classification: md.classification.to_string(),
            warnings: md.warnings.clone(),
            tangent,
        }
    }
}
