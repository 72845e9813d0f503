//! The auxiliary profile φ used to build the Hamiltonians `aφ(j(x))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Float};

/// Half-width of the C² blends at the splice points, relative to the splice
/// point (so exactly `1e-3` at `t = 1`).
pub const BLEND_RADIUS: f64 = 1e-3;

/// Quintic Hermite patch on `[lo, lo + w]` matching value and two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "", deserialize = ""))]
struct Quintic<T: Float> {
    lo: T,
    w: T,
    coef: [T; 6],
}

impl<T: Float> Quintic<T> {
    fn new(lo: T, w: T, left: [T; 3], right: [T; 3]) -> Self {
        // p(u) = Σ cₖ uᵏ with u = (t - lo)/w; derivatives scale by w
        let (p0, d0, s0) = (left[0], left[1] * w, left[2] * w * w);
        let (p1, d1, s1) = (right[0], right[1] * w, right[2] * w * w);
        let c0 = p0;
        let c1 = d0;
        let c2 = s0 * T::HALF;
        let r0 = p1 - c0 - c1 - c2;
        let r1 = d1 - c1 - lit::<T>(2.0) * c2;
        let r2 = s1 - lit::<T>(2.0) * c2;
        // solve [1 1 1; 3 4 5; 6 12 20] [c3 c4 c5] = [r0 r1 r2]
        let c3 = lit::<T>(10.0) * r0 - lit::<T>(4.0) * r1 + r2 * T::HALF;
        let c4 = lit::<T>(-15.0) * r0 + lit::<T>(7.0) * r1 - r2;
        let c5 = lit::<T>(6.0) * r0 - lit::<T>(3.0) * r1 + r2 * T::HALF;
        Self { lo, w, coef: [c0, c1, c2, c3, c4, c5] }
    }

    fn contains(&self, t: T) -> bool {
        t > self.lo && t < self.lo + self.w
    }

    fn eval(&self, t: T) -> [T; 3] {
        let u = (t - self.lo) / self.w;
        let c = &self.coef;
        let mut v = T::ZERO;
        let mut d = T::ZERO;
        let mut s = T::ZERO;
        for k in (0..6).rev() {
            v = v * u + c[k];
        }
        for k in (1..6).rev() {
            d = d * u + T::nat(k) * c[k];
        }
        for k in (2..6).rev() {
            s = s * u + T::nat(k * (k - 1)) * c[k];
        }
        [v, d / self.w, s / (self.w * self.w)]
    }
}

/// Convex profile with `φ(0) = φ′(0) = 0`, `φ″(0) = 1`, equal to `c·t^α` on a
/// core interval and quadratic beyond `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "", deserialize = ""))]
pub struct PhiFunction<T: Float> {
    pub vartheta: T,
    pub alpha: T,
    pub c: T,
    #[serde(rename = "T")]
    pub t_splice: T,
    pub homogeneous_core: bool,
    /// Lower bound of `min(φ′(t)/t, φ″(t))` over the validation grid.
    pub sigma: T,
    head: [T; 3],
    blends: [Quintic<T>; 2],
}

impl<T: Float> PhiFunction<T> {
    /// The unblended piecewise profile.
    fn raw(&self, t: T) -> [T; 3] {
        raw_eval(self.alpha, self.c, self.t_splice, &self.head, t)
    }

    /// `(φ(t), φ′(t), φ″(t))`.
    pub fn eval(&self, t: T) -> [T; 3] {
        for b in &self.blends {
            if b.contains(t) {
                return b.eval(t);
            }
        }
        self.raw(t)
    }

    pub fn value(&self, t: T) -> T {
        self.eval(t)[0]
    }

    pub fn d1(&self, t: T) -> T {
        self.eval(t)[1]
    }

    pub fn d2(&self, t: T) -> T {
        self.eval(t)[2]
    }

    /// `lim φ′(t)/t` as `t → ∞`, the curvature of the quadratic tail.
    pub fn asymptotic_slope(&self) -> T {
        self.alpha * (self.alpha - T::ONE) * self.c * self.t_splice.powf(self.alpha - lit(2.0))
    }

    /// Coefficient of `t²` in the tail, `φ(t) = D₀ + D₁t + D₂t²` for `t ≥ T`.
    pub fn tail_d2(&self) -> T {
        self.asymptotic_slope() * T::HALF
    }

    /// Solves `φ′(t) = s` for `t ≥ 0` by safeguarded Newton in a bracket.
    pub fn inverse_d1(&self, s: T) -> Result<T> {
        if s < T::ZERO {
            return Err(Error::DualDomain("φ′ is nonnegative on [0, ∞)".into()));
        }
        if s == T::ZERO {
            return Ok(T::ZERO);
        }
        let mut lo = T::ZERO;
        let mut hi = T::ONE;
        while self.d1(hi) < s {
            lo = hi;
            hi *= T::TWO;
            if hi > lit(1e300) {
                return Err(Error::DualDomain("φ′ bracket overflow".into()));
            }
        }
        let mut t = (lo + hi) * T::HALF;
        for _ in 0..200 {
            let [_, d, dd] = self.eval(t);
            let f = d - s;
            if f > T::ZERO {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = if dd > T::ZERO { t - f / dd } else { (lo + hi) * T::HALF };
            if !(next > lo && next < hi) {
                next = (lo + hi) * T::HALF;
            }
            if (next - t).abs() <= lit::<T>(1e-12) * next.max(T::EPS) || hi - lo <= T::EPS * hi {
                return Ok(next);
            }
            t = next;
        }
        Ok(t)
    }

    /// Validation grid over `(0, 2T]`, dense near the splice points.
    pub fn grid(&self) -> Vec<T> {
        let top = self.t_splice * T::TWO;
        let mut g: Vec<T> = (1..=4000).map(|k| top * T::nat(k) / lit(4000.0)).collect();
        for s in [T::ONE, self.t_splice] {
            let h = lit::<T>(BLEND_RADIUS) * s;
            for k in 0..=40 {
                g.push(s - h * lit(1.5) + h * lit::<T>(3.0) * T::nat(k) / lit(40.0));
            }
        }
        g.sort_by(|a, b| a.partial_cmp(b).unwrap());
        g.dedup();
        g
    }
}

fn raw_eval<T: Float>(alpha: T, c: T, big_t: T, head: &[T; 3], t: T) -> [T; 3] {
    let [a, b, cc] = *head;
    if t <= T::ONE {
        let v = ((cc * t + b) * t + a) * t * t;
        let d = ((lit::<T>(4.0) * cc * t + lit::<T>(3.0) * b) * t + T::TWO * a) * t;
        let s = (lit::<T>(12.0) * cc * t + lit::<T>(6.0) * b) * t + T::TWO * a;
        [c * v, c * d, c * s]
    } else if t <= big_t {
        let p = t.powf(alpha - lit(2.0));
        [c * p * t * t, c * alpha * p * t, c * alpha * (alpha - T::ONE) * p]
    } else {
        let p = big_t.powf(alpha - lit(2.0));
        let v0 = c * p * big_t * big_t;
        let d0 = c * alpha * p * big_t;
        let s0 = c * alpha * (alpha - T::ONE) * p;
        let u = t - big_t;
        [v0 + d0 * u + s0 * T::HALF * u * u, d0 + s0 * u, s0]
    }
}

/// Builds φ for `ϑ ∈ (0,1)`, `α ∈ (1,2)`. With `homogeneous_core` set,
/// requires `φ′(t)/t > 1 − ϑ` on `[0, 1]`.
pub fn build_phi<T: Float>(vartheta: T, alpha: T, homogeneous_core: bool) -> Result<PhiFunction<T>> {
    if !(vartheta > T::ZERO && vartheta < T::ONE) {
        return Err(Error::Range(format!("vartheta = {vartheta:e} outside (0, 1)")));
    }
    if !(alpha > T::ONE && alpha < T::TWO) {
        return Err(Error::Range(format!("alpha = {alpha:e} outside (1, 2)")));
    }
    let q = alpha * alpha - lit::<T>(7.0) * alpha + lit(12.0);
    let c = T::ONE / q;
    if homogeneous_core && alpha * c <= T::ONE - vartheta {
        return Err(Error::Infeasible(format!(
            "φ′(1)/1 = {:e} does not exceed 1 - vartheta = {:e}; raise alpha or vartheta",
            (alpha * c).to_f64_lossy(),
            (T::ONE - vartheta).to_f64_lossy()
        )));
    }
    let head = [
        q * T::HALF,
        -alpha * alpha + lit::<T>(6.0) * alpha - lit(8.0),
        (alpha * alpha - lit::<T>(5.0) * alpha + lit(6.0)) * T::HALF,
    ];
    // c·α·t^{α−2} < ϑ/(2α−1) for all t ≥ T
    let bound = vartheta / (T::TWO * alpha - T::ONE);
    let t_min = (bound / (c * alpha)).powf(T::ONE / (alpha - T::TWO));
    let big_t = (t_min * lit(1.1)).max(lit(1.5));
    let mk = |s: T| {
        let h = lit::<T>(BLEND_RADIUS) * s;
        let lo = s - h;
        Quintic::new(
            lo,
            h * T::TWO,
            raw_eval(alpha, c, big_t, &head, lo),
            raw_eval(alpha, c, big_t, &head, s + h),
        )
    };
    let mut phi = PhiFunction {
        vartheta,
        alpha,
        c,
        t_splice: big_t,
        homogeneous_core,
        sigma: T::ZERO,
        head,
        blends: [mk(T::ONE), mk(big_t)],
    };
    let grid = phi.grid();
    let mut sigma = phi.asymptotic_slope();
    let mut prev: Option<T> = None;
    for &t in &grid {
        let [_, d, s] = phi.eval(t);
        let ratio = d / t;
        if let Some(p) = prev {
            // neighbouring points closer than roundoff cannot be ordered
            if !(ratio < p + lit::<T>(16.0) * T::EPS * p.abs()) {
                return Err(Error::InvariantViolation(format!(
                    "φ′(t)/t not strictly decreasing near t = {:e}",
                    t.to_f64_lossy()
                )));
            }
        }
        prev = Some(ratio);
        sigma = sigma.min(ratio).min(s);
    }
    if !(sigma > T::ZERO) {
        return Err(Error::InvariantViolation("φ is not uniformly convex".into()));
    }
    phi.sigma = sigma;
    Ok(phi)
}
