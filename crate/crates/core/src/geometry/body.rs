//! Convex bodies described by their gauge function.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Float};

/// One monomial `c · Π xᵢ^{eᵢ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "", deserialize = ""))]
pub struct Monomial<T: Float> {
    pub c: T,
    pub e: Vec<u8>,
}

/// Polynomial defining function `F` with `Σ = F⁻¹(1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "", deserialize = ""))]
pub struct Polynomial<T: Float> {
    pub dim: usize,
    pub terms: Vec<Monomial<T>>,
}

fn powi<T: Float>(x: T, k: u8) -> T {
    let mut r = T::ONE;
    for _ in 0..k {
        r *= x;
    }
    r
}

impl<T: Float> Polynomial<T> {
    pub fn new(dim: usize, terms: Vec<Monomial<T>>) -> Result<Self> {
        for t in &terms {
            if t.e.len() != dim {
                return Err(Error::Dimension(format!("monomial has {} exponents, expected {dim}", t.e.len())));
            }
            let deg: u32 = t.e.iter().map(|&k| k as u32).sum();
            if deg > 4 {
                return Err(Error::Range(format!("monomial degree {deg} exceeds 4")));
            }
        }
        Ok(Self { dim, terms })
    }

    /// `Σ xᵢ²/rᵢ² + ε Σ xᵢ⁴` with `r` repeated over `q` and `p`.
    pub fn perturbed_ellipsoid(r: &[T], eps: T) -> Self {
        let n = r.len();
        let mut terms = Vec::new();
        for i in 0..2 * n {
            let rk = r[i % n];
            let mut e = vec![0u8; 2 * n];
            e[i] = 2;
            terms.push(Monomial { c: T::ONE / (rk * rk), e: e.clone() });
            if eps != T::ZERO {
                e[i] = 4;
                terms.push(Monomial { c: eps, e });
            }
        }
        Self { dim: 2 * n, terms }
    }

    pub fn value(&self, x: &DVector<T>) -> T {
        self.terms
            .iter()
            .map(|t| t.e.iter().enumerate().fold(t.c, |acc, (i, &k)| acc * powi(x[i], k)))
            .fold(T::ZERO, |a, b| a + b)
    }

    /// Value, gradient and Hessian.
    pub fn eval2(&self, x: &DVector<T>) -> (T, DVector<T>, DMatrix<T>) {
        let d = self.dim;
        let mut v = T::ZERO;
        let mut g = DVector::zeros(d);
        let mut h = DMatrix::zeros(d, d);
        for t in &self.terms {
            let p: Vec<T> = (0..d).map(|i| powi(x[i], t.e[i])).collect();
            let dp: Vec<T> = (0..d)
                .map(|i| if t.e[i] == 0 { T::ZERO } else { T::nat(t.e[i] as usize) * powi(x[i], t.e[i] - 1) })
                .collect();
            let ddp: Vec<T> = (0..d)
                .map(|i| {
                    if t.e[i] < 2 {
                        T::ZERO
                    } else {
                        T::nat((t.e[i] as usize) * (t.e[i] as usize - 1)) * powi(x[i], t.e[i] - 2)
                    }
                })
                .collect();
            let prod_except = |skip: &[usize]| -> T {
                (0..d).filter(|i| !skip.contains(i)).fold(T::ONE, |acc, i| acc * p[i])
            };
            v += t.c * prod_except(&[]);
            for i in 0..d {
                if t.e[i] == 0 {
                    continue;
                }
                g[i] += t.c * dp[i] * prod_except(&[i]);
                h[(i, i)] += t.c * ddp[i] * prod_except(&[i]);
                for k in 0..d {
                    if k != i && t.e[k] > 0 {
                        h[(i, k)] += t.c * dp[i] * dp[k] * prod_except(&[i, k]);
                    }
                }
            }
        }
        (v, g, h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind<T: Float> {
    Ellipsoid { r: Vec<T> },
    Generic(Polynomial<T>),
}

/// Compact convex body with smooth boundary `Σ = j⁻¹(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody<T: Float> {
    n: usize,
    kind: BodyKind<T>,
}

/// Gauge value with first and second derivatives.
#[derive(Debug, Clone)]
pub struct GaugeJet<T: Float> {
    pub j: T,
    pub grad: DVector<T>,
    pub hess: DMatrix<T>,
}

impl<T: Float> ConvexBody<T> {
    pub fn ellipsoid(r: Vec<T>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Dimension("ellipsoid needs at least one semi-axis".into()));
        }
        if r.iter().any(|&x| !(x > T::ZERO) || !x.is_finite()) {
            return Err(Error::Range("semi-axes must be positive".into()));
        }
        Ok(Self { n: r.len(), kind: BodyKind::Ellipsoid { r } })
    }

    pub fn generic(f: Polynomial<T>) -> Result<Self> {
        if f.dim == 0 || f.dim % 2 != 0 {
            return Err(Error::Dimension(format!("defining function on ℝ^{}", f.dim)));
        }
        let body = Self { n: f.dim / 2, kind: BodyKind::Generic(f) };
        for i in 0..2 * body.n {
            let mut e = DVector::zeros(2 * body.n);
            e[i] = T::ONE;
            body.gauge(&e)?;
            e[i] = -T::ONE;
            body.gauge(&e)?;
        }
        Ok(body)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &BodyKind<T> {
        &self.kind
    }

    pub fn semi_axes(&self) -> Option<&[T]> {
        match &self.kind {
            BodyKind::Ellipsoid { r } => Some(r),
            BodyKind::Generic(_) => None,
        }
    }

    /// `j(x)`. Zero at the origin.
    pub fn gauge(&self, x: &DVector<T>) -> Result<T> {
        self.check_dim(x)?;
        match &self.kind {
            BodyKind::Ellipsoid { r } => Ok(ellipsoid_quad(r, x).sqrt()),
            BodyKind::Generic(f) => generic_gauge(f, x),
        }
    }

    /// `j`, `j′` and `j″` at `x ≠ 0`.
    pub fn jet(&self, x: &DVector<T>) -> Result<GaugeJet<T>> {
        self.check_dim(x)?;
        if x.iter().all(|v| *v == T::ZERO) {
            return Err(Error::SingularPoint);
        }
        match &self.kind {
            BodyKind::Ellipsoid { r } => {
                let n = self.n;
                let dx = DVector::from_fn(2 * n, |i, _| x[i] / (r[i % n] * r[i % n]));
                let j = ellipsoid_quad(r, x).sqrt();
                let grad = &dx / j;
                let dmat = DMatrix::from_fn(2 * n, 2 * n, |i, k| {
                    if i == k {
                        T::ONE / (r[i % n] * r[i % n])
                    } else {
                        T::ZERO
                    }
                });
                let hess = (dmat - &grad * grad.transpose()) / j;
                Ok(GaugeJet { j, grad, hess })
            }
            BodyKind::Generic(f) => {
                let j = generic_gauge(f, x)?;
                let z = x / j;
                let (_, fp, fpp) = f.eval2(&z);
                let s = fp.dot(&z);
                if !(s > T::ZERO) {
                    return Err(Error::InvariantViolation("defining function not increasing along a ray".into()));
                }
                let grad = &fp / s;
                let w = &fpp * &z + &fp;
                let dg = &fpp / s - &fp * w.transpose() / (s * s);
                let dim = 2 * self.n;
                let proj = DMatrix::identity(dim, dim) - &z * grad.transpose();
                let hess = dg * proj / j;
                let hess = (&hess + hess.transpose()) * T::HALF;
                Ok(GaugeJet { j, grad, hess })
            }
        }
    }

    /// `x / j(x)`.
    pub fn project(&self, x: &DVector<T>) -> Result<DVector<T>> {
        let j = self.gauge(x)?;
        if !(j > T::ZERO) {
            return Err(Error::SingularPoint);
        }
        Ok(x / j)
    }

    /// Support function `h(y) = max_{ξ∈Σ} ξ·y` with its maximizer.
    pub fn support(&self, y: &DVector<T>) -> Result<(T, DVector<T>)> {
        self.check_dim(y)?;
        let ny = y.norm();
        if !(ny > T::ZERO) {
            return Err(Error::DualDomain("support function at the origin".into()));
        }
        match &self.kind {
            BodyKind::Ellipsoid { r } => {
                let n = self.n;
                let dy = DVector::from_fn(2 * n, |i, _| y[i] * r[i % n] * r[i % n]);
                let mu = dy.dot(y).sqrt();
                Ok((mu, dy / mu))
            }
            BodyKind::Generic(_) => self.generic_support(y),
        }
    }

    /// Solves `j′(ξ) = s·y`, `j(ξ) = 1` by damped Newton on the bordered system.
    fn generic_support(&self, y: &DVector<T>) -> Result<(T, DVector<T>)> {
        let dim = 2 * self.n;
        let mut xi = self.project(y)?;
        let mut s = T::ONE / xi.dot(y);
        let scale = y.norm();
        let resid = |xi: &DVector<T>, s: T| -> Result<(DVector<T>, GaugeJet<T>)> {
            let g = self.jet(xi)?;
            let mut r = DVector::zeros(dim + 1);
            r.rows_mut(0, dim).copy_from(&(&g.grad - y * s));
            r[dim] = g.j - T::ONE;
            Ok((r, g))
        };
        let (mut r, mut g) = resid(&xi, s)?;
        for _ in 0..60 {
            if r.norm() <= lit::<T>(1e-13) * (T::ONE + scale * s) {
                return Ok((T::ONE / s, xi));
            }
            let mut a = DMatrix::zeros(dim + 1, dim + 1);
            a.view_mut((0, 0), (dim, dim)).copy_from(&g.hess);
            for i in 0..dim {
                a[(i, dim)] = -y[i];
                a[(dim, i)] = g.grad[i];
            }
            let step = a
                .lu()
                .solve(&(-&r))
                .ok_or_else(|| Error::DualDomain("singular bordered system".into()))?;
            let mut t = T::ONE;
            loop {
                let xn = &xi + step.rows(0, dim) * t;
                let sn = s + step[dim] * t;
                if sn > T::ZERO {
                    if let Ok((rn, gn)) = resid(&xn, sn) {
                        if rn.norm() < r.norm() || t < lit(1e-3) {
                            xi = xn;
                            s = sn;
                            r = rn;
                            g = gn;
                            break;
                        }
                    }
                }
                t *= T::HALF;
                if t < lit(1e-6) {
                    return Err(Error::DualDomain("support point search stalled".into()));
                }
            }
        }
        Err(Error::DualDomain("support point search did not converge".into()))
    }

    /// `min |y|²` and `max |y|²` over Σ; exact for ellipsoids, sampled otherwise.
    pub fn radius_bounds(&self) -> Result<(T, T)> {
        match &self.kind {
            BodyKind::Ellipsoid { r } => {
                let lo = r.iter().fold(r[0], |a, &b| a.min(b));
                let hi = r.iter().fold(r[0], |a, &b| a.max(b));
                Ok((lo * lo, hi * hi))
            }
            BodyKind::Generic(_) => {
                let mut lo = T::max_value().unwrap_or(lit(1e300));
                let mut hi = T::ZERO;
                for d in crate::geometry::sampling::directions::<T>(2 * self.n, 2000, 11) {
                    let y = self.project(&d)?;
                    let q = y.norm_squared();
                    lo = lo.min(q);
                    hi = hi.max(q);
                }
                Ok((lo, hi))
            }
        }
    }

    fn check_dim(&self, x: &DVector<T>) -> Result<()> {
        if x.len() != 2 * self.n {
            return Err(Error::Dimension(format!("point of length {} in ℝ^{}", x.len(), 2 * self.n)));
        }
        Ok(())
    }
}

fn ellipsoid_quad<T: Float>(r: &[T], x: &DVector<T>) -> T {
    let n = r.len();
    (0..2 * n).fold(T::ZERO, |acc, i| acc + x[i] * x[i] / (r[i % n] * r[i % n]))
}

/// Solves `F(x/λ) = 1` for `λ > 0` by safeguarded Newton.
fn generic_gauge<T: Float>(f: &Polynomial<T>, x: &DVector<T>) -> Result<T> {
    if x.iter().all(|v| *v == T::ZERO) {
        return Ok(T::ZERO);
    }
    let g = |lam: T| f.value(&(x / lam)) - T::ONE;
    let mut lo = x.norm();
    let mut hi = lo;
    let mut guard = 0;
    while g(hi) > T::ZERO {
        hi *= T::TWO;
        guard += 1;
        if guard > 200 {
            return Err(Error::InvariantViolation("gauge bracket failed: body unbounded".into()));
        }
    }
    guard = 0;
    while g(lo) < T::ZERO {
        lo *= T::HALF;
        guard += 1;
        if guard > 200 {
            return Err(Error::InvariantViolation("gauge bracket failed: origin not interior".into()));
        }
    }
    let mut lam = (lo + hi) * T::HALF;
    let tol = lit::<T>(1e-12);
    for _ in 0..200 {
        let z = x / lam;
        let (v, gr, _) = f.eval2(&z);
        let gv = v - T::ONE;
        if gv > T::ZERO {
            lo = lam;
        } else {
            hi = lam;
        }
        let dg = -gr.dot(&z) / lam;
        let mut next = if dg != T::ZERO { lam - gv / dg } else { (lo + hi) * T::HALF };
        if !(next > lo && next < hi) {
            next = (lo + hi) * T::HALF;
        }
        if (next - lam).abs() <= tol * lam || (hi - lo) <= T::EPS * lam * lit(4.0) {
            return Ok(next);
        }
        lam = next;
    }
    Ok(lam)
}
