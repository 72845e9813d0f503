//! ω-index of sampled symplectic paths.
//!
//! The path γ∗ξₙ is tracked through the unitary images of the graphs Gr(γ(t))
//! in the Lagrangian Grassmannian of (ℂ⁴ⁿ, −J ⊕ J). Intersections with Gr(ωI)
//! are eigenvalue passages of `W(t) = U_ω* U_γ(t)` through a point of the unit
//! circle, counted with the sign of the passage. Because both ends of the
//! tracked path avoid Gr(ωI), the count may be taken through `e^{iη}` for a
//! small η instead of 1; this keeps sample points that sit exactly on the
//! hypersurface (such as `γ(0) = I` when ω = 1) harmless.

use nalgebra::{Complex, ComplexField, DMatrix};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::index::path::SymplecticPath;
use crate::linalg::{self, CMatrix};
use crate::scalar::{lit, rem_euclid, Float};
use crate::symplectic::{nu_omega, SymplecticMatrix};

const XI_SAMPLES: usize = 64;
const ARC_SAMPLES: usize = 4;
/// Largest Frobenius step of the unitary image between tracked samples.
const MAX_STEP: f64 = 0.4;

/// Unitary image of the Lagrangian Gr(Y) = {(x, Yx)}.
fn souriau<T: Float>(y: &CMatrix<T>) -> CMatrix<T> {
    let d = y.nrows();
    let n = d / 2;
    let i = Complex::new(T::ZERO, T::ONE);
    let mut plus = CMatrix::<T>::zeros(d, d);
    let mut minus = CMatrix::<T>::zeros(d, d);
    for r in 0..n {
        plus[(r, r)] = Complex::new(T::ONE, T::ZERO);
        plus[(r, n + r)] = i;
        minus[(r, r)] = Complex::new(T::ONE, T::ZERO);
        minus[(r, n + r)] = -i;
        for c in 0..d {
            let q = y[(r, c)];
            let p = y[(n + r, c)];
            plus[(n + r, c)] = q - i * p;
            minus[(n + r, c)] = q + i * p;
        }
    }
    let inv = plus.try_inverse().expect("graph of a symplectic map is transverse to the negative space");
    minus * inv
}

fn souriau_real<T: Float>(m: &DMatrix<T>) -> CMatrix<T> {
    souriau(&linalg::complexify(m))
}

fn souriau_scalar<T: Float>(n: usize, omega: Complex<T>) -> CMatrix<T> {
    let mut y = CMatrix::<T>::zeros(2 * n, 2 * n);
    for k in 0..2 * n {
        y[(k, k)] = omega;
    }
    souriau(&y)
}

fn frob<T: Float>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    (a - b).iter().fold(T::ZERO, |s, z| s + z.modulus_squared()).sqrt()
}

/// The scaling path ξₙ from `diag(2, 1/2)^⋄n` to I.
fn xi_samples<T: Float>(n: usize) -> Vec<DMatrix<T>> {
    (0..=XI_SAMPLES)
        .map(|k| {
            let s = T::TWO - T::nat(k) / T::nat(XI_SAMPLES);
            let mut d = DMatrix::<T>::zeros(2 * n, 2 * n);
            for i in 0..n {
                d[(i, i)] = s;
                d[(n + i, n + i)] = T::ONE / s;
            }
            d
        })
        .collect()
}

/// Appends unitary images along `a → b`, bisecting by log-interpolation until
/// consecutive images are close.
fn push_refined<T: Float>(
    a: &DMatrix<T>,
    ua: &CMatrix<T>,
    b: &DMatrix<T>,
    ub: CMatrix<T>,
    depth: u32,
    max_depth: u32,
    out: &mut Vec<CMatrix<T>>,
) -> Result<()> {
    if frob(ua, &ub) <= lit(MAX_STEP) {
        out.push(ub);
        return Ok(());
    }
    if depth >= max_depth {
        return Err(Error::Resolution(format!("no isolation after {max_depth} bisections")));
    }
    // left step b·a⁻¹: iterated paths carry a common right factor whose
    // conditioning would otherwise enter the logarithm
    let ainv = SymplecticMatrix::new_unchecked(a.clone()).inverse();
    let step = b * ainv.matrix();
    let log = linalg::logm(&step).ok_or_else(|| {
        Error::Resolution("samples too far apart to interpolate (no principal logarithm)".into())
    })?;
    let mid = linalg::expm(&(log * T::HALF)) * a;
    let umid = souriau_real(&mid);
    push_refined(a, ua, &mid, umid.clone(), depth + 1, max_depth, out)?;
    let last = out.last().unwrap().clone();
    push_refined(&mid, &last, b, ub, depth + 1, max_depth, out)
}

fn refine_chain<T: Float>(mats: &[DMatrix<T>], max_depth: u32) -> Result<Vec<CMatrix<T>>> {
    let mut out = vec![souriau_real(&mats[0])];
    for w in mats.windows(2) {
        let ua = out.last().unwrap().clone();
        let ub = souriau_real(&w[1]);
        push_refined(&w[0], &ua, &w[1], ub, 0, max_depth, &mut out)?;
    }
    Ok(out)
}

/// A path prepared for index evaluation at any number of ω.
#[derive(Debug, Clone)]
pub struct PreparedPath<T: Float> {
    n: usize,
    chain: Vec<CMatrix<T>>,
    end: SymplecticMatrix<T>,
    arcs: [Vec<CMatrix<T>>; 2],
    tol: Tolerances,
}

impl<T: Float> PreparedPath<T> {
    pub fn new(path: &SymplecticPath<T>, tol: &Tolerances) -> Result<Self> {
        let n = path.n();
        let mut mats = xi_samples::<T>(n);
        mats.extend(path.matrices().iter().skip(1).map(|m| m.matrix().clone()));
        let chain = refine_chain(&mats, tol.max_refine)?;
        let end = path.endpoint().clone();
        let arc = |delta: f64| -> Result<Vec<CMatrix<T>>> {
            let j = linalg::j_matrix::<T>(n);
            let mut arc = vec![end.matrix().clone()];
            for k in 1..=ARC_SAMPLES {
                let s = lit::<T>(-delta) * T::nat(k) / T::nat(ARC_SAMPLES);
                arc.push(end.matrix() * linalg::expm(&(&j * s)));
            }
            let mut u = refine_chain(&arc, tol.max_refine)?;
            u.remove(0);
            Ok(u)
        };
        let arcs = [arc(tol.perturb_delta)?, arc(tol.perturb_delta / 2.0)?];
        Ok(Self { n, chain, end, arcs, tol: *tol })
    }

    pub fn endpoint(&self) -> &SymplecticMatrix<T> {
        &self.end
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of tracked samples after refinement.
    pub fn resolution(&self) -> usize {
        self.chain.len()
    }

    /// `(i_ω, ν_ω)`; a degenerate endpoint is pushed off by `e^{−δtJ}` and the
    /// result is certified against `δ/2`.
    pub fn index(&self, omega: Complex<T>) -> Result<(i64, usize)> {
        let nu = nu_omega(&self.end, omega, &self.tol);
        if nu == 0 {
            return Ok((self.count(omega, &[])?, 0));
        }
        let a = self.count(omega, &self.arcs[0])?;
        let b = self.count(omega, &self.arcs[1])?;
        if a != b {
            return Err(Error::Stability { what: "degenerate endpoint".into(), first: a, second: b });
        }
        Ok((a, nu))
    }

    fn count(&self, omega: Complex<T>, extra: &[CMatrix<T>]) -> Result<i64> {
        let uw = souriau_scalar(self.n, omega).adjoint();
        let angles: Vec<Vec<T>> = self
            .chain
            .iter()
            .chain(extra.iter())
            .map(|u| linalg::eigenvalues_c(&(&uw * u)).iter().map(|z| z.im.atan2(z.re)).collect())
            .collect();
        let first = &angles[0];
        let last = angles.last().unwrap();
        let gap = first
            .iter()
            .chain(last.iter())
            .fold(T::pi(), |g, a| g.min(a.abs()));
        if !(gap > lit(1e-13)) {
            return Err(Error::Resolution("tracked path ends on the hypersurface".into()));
        }
        let eta = choose_cut(&angles, gap)?;
        let two_pi = T::two_pi();
        let shifted = |a: T| eta + rem_euclid(a - eta, two_pi);
        let sums: Vec<T> = angles.iter().map(|v| v.iter().fold(T::ZERO, |s, &a| s + shifted(a))).collect();
        let mut crossings = 0i64;
        for w in sums.windows(2) {
            let d = w[1] - w[0];
            let principal = rem_euclid(d + T::pi(), two_pi) - T::pi();
            let k = ((principal - d) / two_pi).round();
            crossings += k.to_f64_lossy() as i64;
        }
        Ok(crossings)
    }
}

/// Picks a cut point `e^{iη}` with |η| below the endpoint gap that stays as far
/// as possible from every tracked eigenvalue.
fn choose_cut<T: Float>(angles: &[Vec<T>], gap: T) -> Result<T> {
    // golden-ratio steps: samples of rotation-like paths often sit at rational
    // fractions of the gap
    let fractions = (1..=24).map(|k| 0.15 + 0.7 * (k as f64 * 0.618_033_988_749_895).fract());
    let two_pi = T::two_pi();
    let mut best = (T::ZERO, -T::ONE);
    for f in fractions {
        for sign in [T::ONE, -T::ONE] {
            let eta = gap * lit(f) * sign;
            let dist = angles
                .iter()
                .flat_map(|v| v.iter())
                .map(|&a| {
                    let d = rem_euclid(a - eta, two_pi);
                    d.min(two_pi - d)
                })
                .fold(T::pi(), |m, d| m.min(d));
            if dist > best.1 {
                best = (eta, dist);
            }
        }
    }
    if best.1 > lit(1e-14) {
        Ok(best.0)
    } else {
        Err(Error::Resolution("no clean cut point for crossing count".into()))
    }
}

/// `(i_ω(γ), ν_ω(γ))` per the intersection-number definition.
pub fn omega_index<T: Float>(gamma: &SymplecticPath<T>, omega: Complex<T>, tol: &Tolerances) -> Result<(i64, usize)> {
    PreparedPath::new(gamma, tol)?.index(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{realize, BasicNormalForm};

    fn rot(a: f64) -> SymplecticMatrix<f64> {
        let j = linalg::j_matrix::<f64>(1);
        SymplecticMatrix::new_unchecked(linalg::expm(&(j * a)))
    }

    fn rotation_path(theta: f64, samples: usize) -> SymplecticPath<f64> {
        SymplecticPath::from_fn(1.0, samples, |t| rot(t * theta))
    }

    #[test]
    fn planar_rotation_calibration() {
        let tol = Tolerances::default();
        let one = Complex::new(1.0, 0.0);
        let (i, nu) = omega_index(&rotation_path(3.0, 16), one, &tol).unwrap();
        assert_eq!((i, nu), (1, 0));
    }

    #[test]
    fn rotation_indices() {
        let tol = Tolerances::default();
        let one = Complex::new(1.0, 0.0);
        for (theta, expect) in [(1.0, 1), (7.0, 3), (13.0, 5), (-1.0, -1), (-7.0, -3)] {
            let (i, _) = omega_index(&rotation_path(theta, 40), one, &tol).unwrap();
            assert_eq!(i, expect, "theta {theta}");
        }
        // full turn ends degenerate at I
        let (i, nu) = omega_index(&rotation_path(std::f64::consts::TAU, 40), one, &tol).unwrap();
        assert_eq!((i, nu), (1, 2));
    }

    #[test]
    fn hyperbolic_loop_is_trivial() {
        let tol = Tolerances::default();
        let p = SymplecticPath::from_fn(1.0, 10, |t| {
            let mut d = DMatrix::identity(2, 2);
            d[(0, 0)] = 1.0 + t;
            d[(1, 1)] = 1.0 / (1.0 + t);
            SymplecticMatrix::new_unchecked(d)
        });
        for w in [1.0f64, 2.0, 3.0] {
            let (i, _) = omega_index(&p, Complex::new(w.cos(), w.sin()), &tol).unwrap();
            assert_eq!(i, 0);
        }
        let _ = realize(&BasicNormalForm::<f64>::D { lambda: 2 });
    }
}
