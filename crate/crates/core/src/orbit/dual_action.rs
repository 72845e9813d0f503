//! Fourier-truncated dual action `Ψ_a(u) = ∫ ½Ju·Mu + G_a(−Ju)` on mean-zero loops.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::hamiltonian_orbit;
use crate::geometry::{fenchel, FenchelDual, HamiltonianForm, HamiltonianModel};
use crate::linalg::apply_j;
use crate::orbit::characteristic::{characteristic_field, ClosedCharacteristic, OrbitSource};
use crate::scalar::{lit, Float};

/// `u(t) = Σ_{0<|k|≤N} e^{2πkJt} x_k`; `pos[k−1] = x_k`, `neg[k−1] = x_{−k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierLoop<T: Float> {
    pub pos: Vec<DVector<T>>,
    pub neg: Vec<DVector<T>>,
}

impl<T: Float> FourierLoop<T> {
    pub fn zeros(dim: usize, modes: usize) -> Self {
        Self { pos: vec![DVector::zeros(dim); modes], neg: vec![DVector::zeros(dim); modes] }
    }

    pub fn modes(&self) -> usize {
        self.pos.len()
    }

    pub fn dim(&self) -> usize {
        self.pos[0].len()
    }

    /// Real coefficients `(a_k, b_k)` of `Σ a_k cos 2πkt + b_k sin 2πkt`.
    fn to_real(&self) -> DVector<T> {
        let d = self.dim();
        let mut c = DVector::zeros(2 * d * self.modes());
        for k in 0..self.modes() {
            let a = &self.pos[k] + &self.neg[k];
            let b = apply_j(&(&self.pos[k] - &self.neg[k]));
            c.rows_mut(2 * d * k, d).copy_from(&a);
            c.rows_mut(2 * d * k + d, d).copy_from(&b);
        }
        c
    }

    fn from_real(c: &DVector<T>, dim: usize) -> Self {
        let modes = c.len() / (2 * dim);
        let mut out = Self::zeros(dim, modes);
        for k in 0..modes {
            let a = c.rows(2 * dim * k, dim).into_owned();
            let jb = apply_j(&c.rows(2 * dim * k + dim, dim).into_owned());
            out.pos[k] = (&a - &jb) * T::HALF;
            out.neg[k] = (&a + &jb) * T::HALF;
        }
        out
    }

    /// Same loop with the truncation order changed (padding or cutting modes).
    pub fn with_modes(&self, modes: usize) -> Self {
        let mut out = Self::zeros(self.dim(), modes);
        for k in 0..modes.min(self.modes()) {
            out.pos[k] = self.pos[k].clone();
            out.neg[k] = self.neg[k].clone();
        }
        out
    }

    pub fn eval(&self, t: T) -> DVector<T> {
        let mut u = DVector::zeros(self.dim());
        for k in 0..self.modes() {
            let th = T::two_pi() * T::nat(k + 1) * t;
            let (s, c) = th.sin_cos();
            // e^{θJ}x = cos θ x + sin θ Jx
            let sum = &self.pos[k] + &self.neg[k];
            let diff = &self.pos[k] - &self.neg[k];
            u += sum * c + apply_j(&diff) * s;
        }
        u
    }

    /// `L²` norm on `[0, 1]`.
    pub fn norm(&self) -> T {
        (self.to_real().norm_squared() * T::HALF).sqrt()
    }

    /// Velocity of the circle `x(t) = r(cos 2πt e_j + sin 2πt e_{j+n})`.
    pub fn planar(n: usize, j: usize, modes: usize, radius: T) -> Self {
        let mut out = Self::zeros(2 * n, modes);
        let mut v = DVector::zeros(2 * n);
        v[j + n] = T::two_pi() * radius;
        out.pos[0] = v;
        out
    }

    /// Derivative `ẋ` of the rescaled orbit `x(t) = ρ y(τt)` of `H_a`.
    pub fn from_orbit(hm: &HamiltonianModel<T>, orbit: &ClosedCharacteristic<T>, modes: usize) -> Result<Self> {
        let (_, _, rho) = hamiltonian_orbit(hm, orbit)?;
        let samples = 4 * modes.max(8);
        let dim = orbit.dim();
        let mut c = DVector::zeros(2 * dim * modes);
        for i in 0..samples {
            let t = T::nat(i) / T::nat(samples);
            let y = orbit.point_at(orbit.tau * t);
            let u = characteristic_field(&hm.body, &y)? * (rho * orbit.tau);
            for k in 0..modes {
                let (s, cs) = (T::two_pi() * T::nat(k + 1) * t).sin_cos();
                let w = T::TWO / T::nat(samples);
                for r in 0..dim {
                    c[2 * dim * k + r] += w * cs * u[r];
                    c[2 * dim * k + dim + r] += w * s * u[r];
                }
            }
        }
        Ok(Self::from_real(&c, dim))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualActionOptions {
    pub max_descent: usize,
    pub max_newton: usize,
    pub grad_tol: f64,
    /// Gradient norm below which Newton steps are attempted.
    pub newton_switch: f64,
    pub samples: usize,
    /// Re-run at twice the modes and bound the period drift.
    pub certify: bool,
    pub certify_tol: f64,
}

impl Default for DualActionOptions {
    fn default() -> Self {
        Self {
            max_descent: 20_000,
            max_newton: 60,
            grad_tol: 1e-10,
            newton_switch: 1e-3,
            samples: 256,
            certify: true,
            certify_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DualActionResult<T: Float> {
    pub fourier: FourierLoop<T>,
    pub orbit: ClosedCharacteristic<T>,
    pub psi: T,
    pub grad_norm: T,
    pub descent_steps: usize,
    pub newton_steps: usize,
    pub rho: T,
    /// `ξ` with `x = Mu − ξ`.
    pub xi: DVector<T>,
    /// `max |Mu − ξ − G′(−Ju)|` over the quadrature nodes.
    pub xi_defect: T,
    /// Smallest `Ψ(u) − (C₄‖u‖² − C)` seen along the iteration; `None` when `C₄ ≤ 0`.
    pub lower_bound_margin: Option<f64>,
    /// Relative period drift against the run at twice the modes.
    pub certified_drift: Option<f64>,
}

struct Problem<T: Float> {
    dual: FenchelDual<T>,
    dim: usize,
    modes: usize,
    nodes: usize,
    cos: Vec<Vec<T>>,
    sin: Vec<Vec<T>>,
}

impl<T: Float> Problem<T> {
    fn new(hm: &HamiltonianModel<T>, modes: usize) -> Self {
        let nodes = 4 * modes;
        let table = |f: fn(T) -> T| -> Vec<Vec<T>> {
            (1..=modes)
                .map(|k| (0..nodes).map(|i| f(T::two_pi() * T::nat((k * i) % nodes) / T::nat(nodes))).collect())
                .collect()
        };
        Self {
            dual: fenchel(hm),
            dim: 2 * hm.n(),
            modes,
            nodes,
            cos: table(|x| x.cos()),
            sin: table(|x| x.sin()),
        }
    }

    fn u_at(&self, c: &DVector<T>, i: usize) -> DVector<T> {
        let d = self.dim;
        let mut u = DVector::zeros(d);
        for k in 0..self.modes {
            u.axpy(self.cos[k][i], &c.rows(2 * d * k, d), T::ONE);
            u.axpy(self.sin[k][i], &c.rows(2 * d * k + d, d), T::ONE);
        }
        u
    }

    fn mu_at(&self, c: &DVector<T>, i: usize) -> DVector<T> {
        let d = self.dim;
        let mut m = DVector::zeros(d);
        for k in 0..self.modes {
            let w = T::ONE / (T::two_pi() * T::nat(k + 1));
            m.axpy(w * self.sin[k][i], &c.rows(2 * d * k, d), T::ONE);
            m.axpy(-w * self.cos[k][i], &c.rows(2 * d * k + d, d), T::ONE);
        }
        m
    }

    fn quadratic(&self, c: &DVector<T>) -> T {
        let d = self.dim;
        let mut q = T::ZERO;
        for k in 0..self.modes {
            let a = c.rows(2 * d * k, d).into_owned();
            let b = c.rows(2 * d * k + d, d).into_owned();
            q -= apply_j(&a).dot(&b) / (lit::<T>(4.0) * T::pi() * T::nat(k + 1));
        }
        q
    }

    fn value(&self, c: &DVector<T>) -> Result<T> {
        let mut g = T::ZERO;
        for i in 0..self.nodes {
            g += self.dual.value(&-apply_j(&self.u_at(c, i)))?;
        }
        Ok(self.quadratic(c) + g / T::nat(self.nodes))
    }

    fn gradient(&self, c: &DVector<T>, hessian: bool) -> Result<(T, DVector<T>, Option<DMatrix<T>>)> {
        let d = self.dim;
        let p = c.len();
        let s = T::nat(self.nodes);
        let mut grad = DVector::zeros(p);
        let mut hess = if hessian { Some(DMatrix::zeros(p, p)) } else { None };
        for k in 0..self.modes {
            let w = T::ONE / (lit::<T>(4.0) * T::pi() * T::nat(k + 1));
            let a = c.rows(2 * d * k, d).into_owned();
            let b = c.rows(2 * d * k + d, d).into_owned();
            grad.rows_mut(2 * d * k, d).axpy(w, &apply_j(&b), T::ONE);
            grad.rows_mut(2 * d * k + d, d).axpy(-w, &apply_j(&a), T::ONE);
            if let Some(h) = hess.as_mut() {
                let jm = crate::linalg::j_matrix::<T>(d / 2) * w;
                h.view_mut((2 * d * k, 2 * d * k + d), (d, d)).add_assign(&jm);
                h.view_mut((2 * d * k + d, 2 * d * k), (d, d)).add_assign(&jm.transpose());
            }
        }
        let mut g_sum = T::ZERO;
        let jmat = crate::linalg::j_matrix::<T>(d / 2);
        for i in 0..self.nodes {
            let y = -apply_j(&self.u_at(c, i));
            let jet = self.dual.eval(&y, hessian)?;
            g_sum += jet.value;
            let jg = apply_j(&jet.grad) / s;
            let basis: Vec<T> = (0..self.modes).flat_map(|k| [self.cos[k][i], self.sin[k][i]]).collect();
            for (q, &bq) in basis.iter().enumerate() {
                grad.rows_mut(q * d, d).axpy(bq, &jg, T::ONE);
            }
            if let (Some(h), Some(gh)) = (hess.as_mut(), jet.hess.as_ref()) {
                let w = jmat.transpose() * gh * &jmat / s;
                for (q, &bq) in basis.iter().enumerate() {
                    for (r, &br) in basis.iter().enumerate() {
                        let f = bq * br;
                        let mut blk = h.view_mut((q * d, r * d), (d, d));
                        blk.zip_apply(&w, |x, y| *x += f * y);
                    }
                }
            }
        }
        let value = self.quadratic(c) + g_sum / s;
        Ok((value, grad, hess))
    }
}

trait AddAssignView<T> {
    fn add_assign(&mut self, m: &DMatrix<T>);
}

impl<T: Float> AddAssignView<T> for nalgebra::DMatrixViewMut<'_, T> {
    fn add_assign(&mut self, m: &DMatrix<T>) {
        self.zip_apply(m, |x, y| *x += y);
    }
}

fn pseudo_solve<T: Float>(h: &DMatrix<T>, g: &DVector<T>) -> DVector<T> {
    let eig = h.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(T::ZERO, |a, &b| a.max(b.abs()));
    let cut = top * lit(1e-10);
    let mut coef = eig.eigenvectors.transpose() * g;
    for (i, l) in eig.eigenvalues.iter().enumerate() {
        coef[i] = if l.abs() > cut { coef[i] / *l } else { T::ZERO };
    }
    eig.eigenvectors * coef
}

struct Minimized<T: Float> {
    c: DVector<T>,
    psi: T,
    grad_norm: T,
    descent: usize,
    newton: usize,
    margin: Option<f64>,
}

fn minimize<T: Float>(prob: &Problem<T>, c0: DVector<T>, opts: &DualActionOptions, bound: Option<(f64, f64)>) -> Result<Minimized<T>> {
    let mut c = c0;
    let (mut psi, mut g, _) = prob.gradient(&c, false)?;
    let mut step = T::ONE;
    let mut descent = 0;
    let mut newton = 0;
    let mut margin: Option<f64> = None;
    let check = |psi: T, c: &DVector<T>, margin: &mut Option<f64>| -> Result<()> {
        if let Some((c4, cc)) = bound {
            let u2 = 0.5 * c.norm_squared().to_f64_lossy();
            let m = psi.to_f64_lossy() - (c4 * u2 - cc);
            *margin = Some(margin.map_or(m, |x: f64| x.min(m)));
            if m < -1e-9 * (1.0 + cc.abs()) {
                return Err(Error::InvariantViolation(format!("dual action below its quadratic lower bound by {m:e}")));
            }
        }
        Ok(())
    };
    check(psi, &c, &mut margin)?;
    let tol = lit::<T>(opts.grad_tol);
    while g.norm() > tol {
        let mut moved = false;
        if g.norm() < lit(opts.newton_switch) && newton < opts.max_newton {
            let (_, _, h) = prob.gradient(&c, true)?;
            let dir = -pseudo_solve(&h.unwrap(), &g);
            let mut s = T::ONE;
            for _ in 0..12 {
                let trial = &c + &dir * s;
                if let Ok((p1, g1, _)) = prob.gradient(&trial, false) {
                    if g1.norm() < g.norm() * (T::ONE - lit::<T>(1e-4) * s) {
                        c = trial;
                        psi = p1;
                        g = g1;
                        moved = true;
                        break;
                    }
                }
                s *= T::HALF;
            }
            newton += 1;
            if moved {
                check(psi, &c, &mut margin)?;
                continue;
            }
        }
        if descent >= opts.max_descent {
            break;
        }
        // Armijo descent
        let gg = g.norm_squared();
        step *= T::TWO;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = &c - &g * step;
            if let Ok(p1) = prob.value(&trial) {
                if p1 <= psi - lit::<T>(1e-4) * step * gg {
                    let (p1, g1, _) = prob.gradient(&trial, false)?;
                    c = trial;
                    psi = p1;
                    g = g1;
                    accepted = true;
                    break;
                }
            }
            step *= T::HALF;
        }
        descent += 1;
        if !accepted {
            if newton >= opts.max_newton {
                break;
            }
            // force a Newton attempt next round
            newton = newton.min(opts.max_newton.saturating_sub(1));
            if g.norm() >= lit(opts.newton_switch) {
                break;
            }
        }
        check(psi, &c, &mut margin)?;
    }
    let grad_norm = g.norm();
    Ok(Minimized { c, psi, grad_norm, descent, newton, margin })
}

/// Finds a critical point of `Ψ_a` from `loop0` and rescales it to a closed
/// characteristic on `Σ`. Needs the scaled Hamiltonian.
pub fn dual_action<T: Float>(
    hm: &HamiltonianModel<T>,
    loop0: &FourierLoop<T>,
    opts: &DualActionOptions,
) -> Result<DualActionResult<T>> {
    let HamiltonianForm::Scaled { a, phi } = &hm.form else {
        return Err(Error::Precondition("the dual action needs the scaled Hamiltonian".into()));
    };
    let modes = loop0.modes();
    if modes < 8 {
        return Err(Error::Precondition(format!("need at least 8 Fourier modes, got {modes}")));
    }
    if loop0.dim() != 2 * hm.n() {
        return Err(Error::Dimension(format!("loop in ℝ^{} for a body in ℝ^{}", loop0.dim(), 2 * hm.n())));
    }
    let bounds = hm.bounds()?;
    let c4 = 1.0 / (2.0 * bounds.eps2) - 1.0 / (4.0 * std::f64::consts::PI);
    let bound = (c4 > 0.0).then_some((c4, bounds.c));
    let prob = Problem::new(hm, modes);
    let min = minimize(&prob, loop0.to_real(), opts, bound)?;
    if min.grad_norm > lit(opts.grad_tol) {
        return Err(Error::NoConvergence(format!(
            "dual action gradient {:e} after {} descent and {} Newton steps",
            min.grad_norm.to_f64_lossy(),
            min.descent,
            min.newton
        )));
    }
    let fourier = FourierLoop::from_real(&min.c, prob.dim);
    if fourier.norm() < lit(1e-8) {
        return Err(Error::TrivialSolution);
    }
    // x = G′(−Ju) = Mu − ξ
    let d = prob.dim;
    let mut xs = Vec::with_capacity(prob.nodes);
    let mut xi = DVector::zeros(d);
    for i in 0..prob.nodes {
        let x = prob.dual.grad(&-apply_j(&prob.u_at(&min.c, i)))?;
        xi += prob.mu_at(&min.c, i) - &x;
        xs.push(x);
    }
    xi /= T::nat(prob.nodes);
    let mut xi_defect = T::ZERO;
    for (i, x) in xs.iter().enumerate() {
        xi_defect = xi_defect.max((prob.mu_at(&min.c, i) - &xi - x).norm());
    }
    let mut rho = T::ZERO;
    for x in &xs {
        rho += hm.body.gauge(x)?;
    }
    rho /= T::nat(xs.len());
    let tau = *a * phi.d1(rho) / rho;
    // dense reconstruction from the Fourier series of Mu
    let samples = opts.samples.max(8);
    let mut pts = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let t = T::nat(i % samples) / T::nat(samples);
        let u = fourier.eval(t);
        let x = prob.dual.grad(&-apply_j(&u))?;
        let g = hm.body.gauge(&x)?;
        pts.push(x / g);
    }
    let orbit = ClosedCharacteristic::from_samples(&hm.body, tau, pts, OrbitSource::DualAction, 1)?;
    let mut out = DualActionResult {
        fourier,
        orbit,
        psi: min.psi,
        grad_norm: min.grad_norm,
        descent_steps: min.descent,
        newton_steps: min.newton,
        rho,
        xi,
        xi_defect,
        lower_bound_margin: min.margin,
        certified_drift: None,
    };
    if opts.certify {
        let fine = Problem::new(hm, 2 * modes);
        let start = out.fourier.with_modes(2 * modes).to_real();
        let m2 = minimize(&fine, start, opts, bound)?;
        if m2.grad_norm > lit(opts.grad_tol) {
            return Err(Error::NoConvergence("certification run at twice the modes did not converge".into()));
        }
        let mut rho2 = T::ZERO;
        for i in 0..fine.nodes {
            rho2 += hm.body.gauge(&fine.dual.grad(&-apply_j(&fine.u_at(&m2.c, i)))?)?;
        }
        rho2 /= T::nat(fine.nodes);
        let tau2 = *a * phi.d1(rho2) / rho2;
        let drift = ((tau2 - tau) / tau).abs().to_f64_lossy();
        out.certified_drift = Some(drift);
        if drift > opts.certify_tol {
            return Err(Error::NoConvergence(format!("period drift {drift:e} between N and 2N modes")));
        }
    }
    Ok(out)
}

/// `Ψ_{a,τ} = ½aφ′(ρ)ρ − aφ(ρ)` with `φ′(ρ)/ρ = τ/a`.
pub fn critical_value<T: Float>(hm: &HamiltonianModel<T>, tau: T) -> Result<T> {
    let HamiltonianForm::Scaled { a, phi } = &hm.form else {
        return Err(Error::Precondition("critical values need the scaled Hamiltonian".into()));
    };
    let dummy = ClosedCharacteristic {
        tau,
        times: vec![T::ZERO],
        points: vec![DVector::zeros(2 * hm.n())],
        velocities: vec![DVector::zeros(2 * hm.n())],
        multiplicity: 1,
        source: OrbitSource::Analytic,
        residual: T::ZERO,
    };
    let (_, _, rho) = hamiltonian_orbit(hm, &dummy)?;
    let [v, d1, _] = phi.eval(rho);
    Ok(*a * (T::HALF * d1 * rho - v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityAudit {
    pub a_grid: Vec<f64>,
    pub taus: Vec<f64>,
    /// `values[i][k]` = `Ψ_{a_i, τ_k}`.
    pub values: Vec<Vec<f64>>,
    pub increasing_in_tau: bool,
    pub decreasing_in_a: bool,
}

/// Checks that `Ψ_{a,τ}` increases in `τ` and decreases in `a` on
/// `{a, 1.5a, 2a}` × the given periods, with `φ` held fixed.
pub fn monotonicity_audit<T: Float>(hm: &HamiltonianModel<T>, taus: &[T]) -> Result<MonotonicityAudit> {
    let HamiltonianForm::Scaled { a, phi } = &hm.form else {
        return Err(Error::Precondition("the audit needs the scaled Hamiltonian".into()));
    };
    let mut sorted: Vec<T> = taus.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let grid = [T::ONE, lit(1.5), T::TWO].map(|f| *a * f);
    let mut values = Vec::new();
    for &ai in &grid {
        let model = HamiltonianModel::scaled(hm.body.clone(), ai, phi.clone())?;
        values.push(
            sorted
                .iter()
                .map(|&t| critical_value(&model, t).map(|v| v.to_f64_lossy()))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let increasing_in_tau = values.iter().all(|row| row.windows(2).all(|w| w[0] <= w[1]));
    let decreasing_in_a = (0..sorted.len()).all(|k| values.windows(2).all(|w| w[0][k] > w[1][k]));
    Ok(MonotonicityAudit {
        a_grid: grid.iter().map(|v| v.to_f64_lossy()).collect(),
        taus: sorted.iter().map(|v| v.to_f64_lossy()).collect(),
        values,
        increasing_in_tau,
        decreasing_in_a,
    })
}
