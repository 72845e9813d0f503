//! Linear symplectic algebra: Sp(2n) elements, ⋄-products, basic normal forms
//! and spectral data on the unit circle.

use nalgebra::{Complex, ComplexField, DMatrix};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::scalar::{lit, Float};

/// A real 2n×2n matrix with `MᵀJM = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix<T: Float> {
    n: usize,
    m: DMatrix<T>,
}

impl<T: Float> SymplecticMatrix<T> {
    /// Checks symplecticity and the determinant against `tol`, scaled by the
    /// squared entry size so large hyperbolic powers are judged fairly.
    pub fn new(m: DMatrix<T>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "expected a nonempty 2n×2n matrix, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows() / 2;
        let size = linalg::max_abs(&m).max(T::ONE);
        let scale = size * size;
        let defect = linalg::symplectic_defect(&m) / scale;
        let t = lit::<T>(tol);
        if !(defect <= t) {
            return Err(Error::NotSymplectic { defect: defect.to_f64_lossy() });
        }
        let det_scale = (0..n).fold(T::ONE, |acc, _| acc * scale);
        let det_err = (m.determinant() - T::ONE).abs() / det_scale;
        if !(det_err <= t) {
            return Err(Error::NotSymplectic { defect: det_err.to_f64_lossy() });
        }
        Ok(Self { n, m })
    }

    /// Wraps a matrix known to be symplectic up to rounding (products,
    /// exponentials of Hamiltonian matrices, normal forms).
    pub(crate) fn new_unchecked(m: DMatrix<T>) -> Self {
        debug_assert!(m.nrows() == m.ncols() && m.nrows() % 2 == 0);
        Self { n: m.nrows() / 2, m }
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked(DMatrix::identity(2 * n, 2 * n))
    }

    pub fn j(n: usize) -> Self {
        Self::new_unchecked(linalg::j_matrix(n))
    }

    /// `exp(JS)` for a symmetric `S`.
    pub fn exp_hamiltonian(s: &DMatrix<T>) -> Result<Self> {
        if s.nrows() != s.ncols() || s.nrows() % 2 != 0 {
            return Err(Error::Dimension("generator must be 2n×2n".into()));
        }
        let sym = (s + s.transpose()) * T::HALF;
        let j = linalg::j_matrix::<T>(s.nrows() / 2);
        Ok(Self::new_unchecked(linalg::expm(&(j * sym))))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.m
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new_unchecked(&self.m * &other.m)
    }

    /// Exact inverse `-J Mᵀ J`.
    pub fn inverse(&self) -> Self {
        let j = linalg::j_matrix::<T>(self.n);
        Self::new_unchecked(-(&j * self.m.transpose() * &j))
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// `P⁻¹ M P`.
    pub fn conjugate_by(&self, p: &Self) -> Self {
        p.inverse().mul(self).mul(p)
    }

    pub fn defect(&self) -> T {
        linalg::symplectic_defect(&self.m)
    }

    pub fn to_f64(&self) -> SymplecticMatrix<f64> {
        SymplecticMatrix::new_unchecked(self.m.map(|x| x.to_f64_lossy()))
    }
}

/// The ⋄-product: interleaves the (q, p) blocks of `m1` and `m2`.
pub fn diamond<T: Float>(m1: &SymplecticMatrix<T>, m2: &SymplecticMatrix<T>) -> SymplecticMatrix<T> {
    let (a, b) = (m1.n, m2.n);
    let n = a + b;
    let mut out = DMatrix::<T>::zeros(2 * n, 2 * n);
    // block (r, c) of m1 lands at offsets (r*n, c*n); m2 is shifted by a.
    for r in 0..2 {
        for c in 0..2 {
            for i in 0..a {
                for k in 0..a {
                    out[(r * n + i, c * n + k)] = m1.m[(r * a + i, c * a + k)];
                }
            }
            for i in 0..b {
                for k in 0..b {
                    out[(r * n + a + i, c * n + a + k)] = m2.m[(r * b + i, c * b + k)];
                }
            }
        }
    }
    SymplecticMatrix::new_unchecked(out)
}

/// ⋄-product of a nonempty list.
pub fn diamond_all<T: Float>(factors: &[SymplecticMatrix<T>]) -> Option<SymplecticMatrix<T>> {
    let (first, rest) = factors.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, f| diamond(&acc, f)))
}

/// The basic normal forms D(λ), N₁(λ,b), R(θ) and N₂(ω,b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", bound(serialize = "", deserialize = ""))]
pub enum BasicNormalForm<T: Float> {
    /// `diag(λ, 1/λ)` with λ = ±2.
    D { lambda: i8 },
    /// `[[λ, b], [0, λ]]` with λ = ±1 and b ∈ {−1, 0, 1}.
    N1 { lambda: i8, b: i8 },
    /// Rotation by θ ∈ (0,π)∪(π,2π).
    R { theta: T },
    /// `[[R(θ), b], [0, R(θ)]]` with `b = [[b1, b2], [b3, b4]]`, b2 ≠ b3.
    N2 { theta: T, b: [T; 4] },
}

impl<T: Float> BasicNormalForm<T> {
    pub fn n(&self) -> usize {
        match self {
            Self::N2 { .. } => 2,
            _ => 1,
        }
    }
}

fn check_theta<T: Float>(theta: T) -> Result<()> {
    let pi = T::pi();
    let ok = theta > T::ZERO && theta < T::two_pi() && theta != pi;
    if ok {
        Ok(())
    } else {
        Err(Error::Range(format!("rotation angle {theta:e} outside (0,π)∪(π,2π)")))
    }
}

fn rotation<T: Float>(theta: T) -> DMatrix<T> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// The literal matrix of a basic normal form.
pub fn realize<T: Float>(nf: &BasicNormalForm<T>) -> Result<SymplecticMatrix<T>> {
    match *nf {
        BasicNormalForm::D { lambda } => {
            if lambda != 2 && lambda != -2 {
                return Err(Error::Range(format!("D(λ) needs λ = ±2, got {lambda}")));
            }
            let l = lit::<T>(lambda as f64);
            Ok(SymplecticMatrix::new_unchecked(DMatrix::from_row_slice(
                2,
                2,
                &[l, T::ZERO, T::ZERO, T::ONE / l],
            )))
        }
        BasicNormalForm::N1 { lambda, b } => {
            if lambda != 1 && lambda != -1 {
                return Err(Error::Range(format!("N1(λ,b) needs λ = ±1, got {lambda}")));
            }
            if !(-1..=1).contains(&b) {
                return Err(Error::Range(format!("N1(λ,b) needs b ∈ {{-1,0,1}}, got {b}")));
            }
            let l = lit::<T>(lambda as f64);
            Ok(SymplecticMatrix::new_unchecked(DMatrix::from_row_slice(
                2,
                2,
                &[l, lit(b as f64), T::ZERO, l],
            )))
        }
        BasicNormalForm::R { theta } => {
            check_theta(theta)?;
            Ok(SymplecticMatrix::new_unchecked(rotation(theta)))
        }
        BasicNormalForm::N2 { theta, b } => {
            check_theta(theta)?;
            if b[1] == b[2] {
                return Err(Error::Range("N2(ω,b) needs b2 ≠ b3".into()));
            }
            let r = rotation(theta);
            let mut m = DMatrix::<T>::zeros(4, 4);
            m.view_mut((0, 0), (2, 2)).copy_from(&r);
            m.view_mut((2, 2), (2, 2)).copy_from(&r);
            m.view_mut((0, 2), (2, 2)).copy_from(&DMatrix::from_row_slice(2, 2, &b));
            SymplecticMatrix::new(m, 1e-10).map_err(|e| Error::Range(format!("N2 block is not symplectic: {e}")))
        }
    }
}

/// Unit complex number `e^{iθ}`.
pub fn unit<T: Float>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Angle of `z` in `[0, 2π)`.
pub fn angle<T: Float>(z: Complex<T>) -> T {
    let a = z.im.atan2(z.re);
    if a < T::ZERO {
        a + T::two_pi()
    } else {
        a
    }
}

fn shifted<T: Float>(m: &DMatrix<T>, omega: Complex<T>) -> CMatrix<T> {
    let mut c = linalg::complexify(m);
    for i in 0..c.nrows() {
        c[(i, i)] -= omega;
    }
    c
}

/// Spectral norm of a real matrix.
fn spectral_norm<T: Float>(m: &DMatrix<T>) -> T {
    m.clone()
        .singular_values()
        .iter()
        .fold(T::ZERO, |a, &b| a.max(b))
}

/// `dim_ℂ ker(M − ωI)` by singular value thresholding. The cutoff is
/// `tol_rank` times the larger of ‖M − ωI‖₂ and ‖M‖₂.
pub fn nu_omega<T: Float>(m: &SymplecticMatrix<T>, omega: Complex<T>, tol: &Tolerances) -> usize {
    let c = shifted(&m.m, omega);
    let sv = linalg::singular_values_c(&c);
    let reference = sv.first().copied().unwrap_or(T::ZERO).max(spectral_norm(&m.m));
    let cut = lit::<T>(tol.tol_rank) * reference;
    sv.iter().filter(|&&s| s <= cut).count()
}

/// `D_ω(M) = (−1)^{n−1} ω̄ⁿ det(M − ωI)`, which is real for unit ω.
pub fn d_omega<T: Float>(m: &SymplecticMatrix<T>, omega: Complex<T>) -> T {
    let n = m.n;
    let det = shifted(&m.m, omega).determinant();
    let mut w = Complex::new(T::ONE, T::ZERO);
    for _ in 0..n {
        w *= omega.conj();
    }
    let sign = if (n - 1) % 2 == 0 { T::ONE } else { -T::ONE };
    (w * det).re * sign
}

/// One eigenvalue on the unit circle with its multiplicities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleEigen<T: Float> {
    pub omega: Complex<T>,
    pub algebraic: usize,
    pub geometric: usize,
}

impl<T: Float> CircleEigen<T> {
    pub fn angle(&self) -> T {
        angle(self.omega)
    }
}

/// Eigenvalues of M on the unit circle, sorted by angle in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircleSpectrum<T: Float> {
    pub eigenvalues: Vec<CircleEigen<T>>,
}

impl<T: Float> CircleSpectrum<T> {
    pub fn contains(&self, omega: Complex<T>, tol: T) -> Option<&CircleEigen<T>> {
        self.eigenvalues.iter().find(|e| (e.omega - omega).modulus() <= tol)
    }

    pub fn algebraic_at_one(&self) -> usize {
        self.eigenvalues
            .iter()
            .find(|e| e.omega.im == T::ZERO && e.omega.re > T::ZERO)
            .map_or(0, |e| e.algebraic)
    }
}

/// Full multiplier data: clustered circle spectrum plus the remaining eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Float> {
    pub circle: CircleSpectrum<T>,
    pub off_circle: Vec<Complex<T>>,
    /// Largest `||λ| − 1|` among circle clusters before snapping.
    pub circle_spread: T,
}

/// Groups eigenvalues closer than `cluster_tol` (single linkage).
fn clusters<T: Float>(ev: &[Complex<T>], cluster_tol: T) -> Vec<Vec<Complex<T>>> {
    let mut label: Vec<usize> = (0..ev.len()).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..ev.len() {
        for k in i + 1..ev.len() {
            if (ev[i] - ev[k]).modulus() < cluster_tol {
                let (a, b) = (find(&mut label, i), find(&mut label, k));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex<T>>)> = Vec::new();
    for i in 0..ev.len() {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(ev[i]),
            None => groups.push((r, vec![ev[i]])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

pub fn spectrum<T: Float>(m: &SymplecticMatrix<T>, tol: &Tolerances) -> Spectrum<T> {
    let ev = linalg::eigenvalues(&m.m);
    let tol_eig = lit::<T>(tol.tol_eig);
    let mut circle = Vec::new();
    let mut off = Vec::new();
    let mut spread = T::ZERO;
    for group in clusters(&ev, lit(tol.cluster_tol)) {
        let k = T::nat(group.len());
        let mean = group.iter().fold(Complex::new(T::ZERO, T::ZERO), |a, &b| a + b) / k;
        let dev = (mean.modulus() - T::ONE).abs();
        if dev <= tol_eig {
            spread = spread.max(dev);
            let mut omega = mean / mean.modulus();
            if omega.im.abs() <= lit(tol.cluster_tol) {
                omega = Complex::new(omega.re.signum(), T::ZERO);
            }
            circle.push(CircleEigen { omega, algebraic: group.len(), geometric: 0 });
        } else {
            off.extend(group);
        }
    }
    for e in circle.iter_mut() {
        e.geometric = nu_omega(m, e.omega, tol);
    }
    circle.sort_by(|a, b| a.angle().partial_cmp(&b.angle()).unwrap_or(std::cmp::Ordering::Equal));
    Spectrum { circle: CircleSpectrum { eigenvalues: circle }, off_circle: off, circle_spread: spread }
}

/// Eigenvalues of M within `tol_eig` of the unit circle, snapped onto it.
pub fn circle_spectrum<T: Float>(m: &SymplecticMatrix<T>, tol: &Tolerances) -> CircleSpectrum<T> {
    spectrum(m, tol).circle
}

/// Serialized form: row-major entries with the half-dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<f64>>,
}

impl<T: Float> From<&SymplecticMatrix<T>> for MatrixJson {
    fn from(m: &SymplecticMatrix<T>) -> Self {
        let d = 2 * m.n;
        MatrixJson {
            n: m.n,
            entries: (0..d).map(|i| (0..d).map(|k| m.m[(i, k)].to_f64_lossy()).collect()).collect(),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self, tol: f64) -> Result<SymplecticMatrix<f64>> {
        let d = 2 * self.n;
        if self.entries.len() != d || self.entries.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension(format!("matrix with n = {} must be {d}×{d}", self.n)));
        }
        let m = DMatrix::from_fn(d, d, |i, k| self.entries[i][k]);
        SymplecticMatrix::new(m, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_diamond() {
        let i2 = SymplecticMatrix::<f64>::identity(1);
        assert_eq!(diamond(&i2, &i2), SymplecticMatrix::identity(2));
    }

    #[test]
    fn diamond_layout() {
        let a = realize(&BasicNormalForm::R { theta: 0.4f64 }).unwrap();
        let b = realize(&BasicNormalForm::R { theta: 1.3f64 }).unwrap();
        let d = diamond(&a, &b);
        let m = d.matrix();
        assert_eq!(m[(0, 0)], 0.4f64.cos());
        assert_eq!(m[(0, 2)], -(0.4f64.sin()));
        assert_eq!(m[(1, 1)], 1.3f64.cos());
        assert_eq!(m[(1, 3)], -(1.3f64.sin()));
        assert_eq!(m[(3, 1)], 1.3f64.sin());
        assert_eq!(m[(0, 1)], 0.0);
        assert_eq!(m[(0, 3)], 0.0);
        assert!(d.defect() < 1e-15);
    }

    #[test]
    fn normal_form_literals() {
        let n1 = realize(&BasicNormalForm::<f64>::N1 { lambda: 1, b: 1 }).unwrap();
        assert_eq!(n1.matrix().as_slice(), &[1.0, 0.0, 1.0, 1.0]);
        let d = realize(&BasicNormalForm::<f64>::D { lambda: 2 }).unwrap();
        assert_eq!(d.matrix()[(0, 0)], 2.0);
        assert_eq!(d.matrix()[(1, 1)], 0.5);
        let r = realize(&BasicNormalForm::R { theta: std::f64::consts::FRAC_PI_2 }).unwrap();
        assert!((r.matrix()[(0, 1)] + 1.0).abs() < 1e-15 && r.matrix()[(0, 0)].abs() < 1e-15);
        assert!(realize(&BasicNormalForm::R { theta: std::f64::consts::PI }).is_err());
        assert!(realize(&BasicNormalForm::<f64>::D { lambda: 3 }).is_err());
        assert!(realize(&BasicNormalForm::<f64>::N1 { lambda: 1, b: 2 }).is_err());
    }

    #[test]
    fn n2_realization() {
        // bᵀR symmetric needs (b3 − b2)cos θ = (b1 + b4) sin θ
        let theta = 1.0f64;
        let b = [theta.cos(), 0.0, theta.sin(), 0.0];
        assert!(realize(&BasicNormalForm::N2 { theta, b }).is_ok());
        assert!(realize(&BasicNormalForm::N2 { theta, b: [0.0, 1.0, 0.0, 0.0] }).is_err());
    }

    #[test]
    fn nullities() {
        let t = tol();
        let one = Complex::new(1.0, 0.0);
        assert_eq!(nu_omega(&SymplecticMatrix::<f64>::identity(1), one, &t), 2);
        let n1 = realize(&BasicNormalForm::<f64>::N1 { lambda: 1, b: 1 }).unwrap();
        assert_eq!(nu_omega(&n1, one, &t), 1);
        let theta = std::f64::consts::PI * (5f64.sqrt() - 1.0);
        let r = realize(&BasicNormalForm::R { theta }).unwrap();
        assert_eq!(nu_omega(&r, unit(theta), &t), 1);
        assert_eq!(nu_omega(&r, one, &t), 0);
    }

    #[test]
    fn d_omega_values() {
        let i2 = SymplecticMatrix::<f64>::identity(1);
        assert!((d_omega(&i2, Complex::new(-1.0, 0.0)) + 4.0).abs() < 1e-14);
        let theta = 2.0f64;
        let r = realize(&BasicNormalForm::R { theta }).unwrap();
        let d = d_omega(&r, Complex::new(1.0, 0.0));
        assert!((d - 2.0 * (1.0 - theta.cos())).abs() < 1e-14);
    }

    #[test]
    fn circle_spectra() {
        let t = tol();
        let d = realize(&BasicNormalForm::<f64>::D { lambda: 2 }).unwrap();
        assert!(circle_spectrum(&d, &t).eigenvalues.is_empty());
        let n1 = realize(&BasicNormalForm::<f64>::N1 { lambda: 1, b: 1 }).unwrap();
        let cs = circle_spectrum(&n1, &t);
        assert_eq!(cs.eigenvalues.len(), 1);
        assert_eq!(cs.eigenvalues[0].omega, Complex::new(1.0, 0.0));
        assert_eq!((cs.eigenvalues[0].algebraic, cs.eigenvalues[0].geometric), (2, 1));
        let theta = 0.9;
        let m = diamond(&realize(&BasicNormalForm::R { theta }).unwrap(), &d);
        let cs = circle_spectrum(&m, &t);
        assert_eq!(cs.eigenvalues.len(), 2);
        assert!((cs.eigenvalues[0].angle() - theta).abs() < 1e-12);
        assert!((cs.eigenvalues[1].angle() - (std::f64::consts::TAU - theta)).abs() < 1e-12);
        assert!(cs.eigenvalues.iter().all(|e| e.algebraic == 1 && e.geometric == 1));
    }

    #[test]
    fn generic_over_f32() {
        let a = realize(&BasicNormalForm::R { theta: 0.4f32 }).unwrap();
        let b = realize(&BasicNormalForm::<f32>::D { lambda: -2 }).unwrap();
        let d = diamond(&a, &b);
        assert!(d.defect() < 1e-6);
        assert!(SymplecticMatrix::new(d.matrix().clone(), 1e-6).is_ok());
    }

    #[test]
    fn json_roundtrip() {
        let m = realize(&BasicNormalForm::R { theta: 0.123456789f64 }).unwrap();
        let j = MatrixJson::from(&m);
        let back = j.to_matrix(1e-10).unwrap();
        assert_eq!(back, m);
    }
}
