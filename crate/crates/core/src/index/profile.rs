//! Index function on the unit circle, splitting numbers, iteration tables and
//! mean index.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::index::normal_form::{mean_index_from_normal_forms, normal_form_decomposition};
use crate::index::omega::{omega_index, PreparedPath};
use crate::index::path::{iterate_path, SymplecticPath};
use crate::index::rational::MinimalPeriod;
use crate::scalar::{lit, rem_euclid, Float};
use crate::symplectic::{angle, nu_omega, spectrum, unit, CircleSpectrum, SymplecticMatrix};

/// Jumps of the ω-index at one point of the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint<T: Float> {
    pub angle: T,
    pub value: i64,
    pub nullity: usize,
    pub s_plus: i64,
    pub s_minus: i64,
}

impl<T: Float> Breakpoint<T> {
    pub fn omega(&self) -> Complex<T> {
        unit(self.angle)
    }
}

/// The piecewise constant map θ ↦ i_{e^{iθ}}(γ). `points[0]` sits at θ = 0 and
/// `arcs[k]` is the value on the open arc after `points[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexFunction<T: Float> {
    pub n: usize,
    pub points: Vec<Breakpoint<T>>,
    pub arcs: Vec<i64>,
    /// Angles closer than this (as fractions of a turn) are identified.
    pub match_tol: f64,
}

impl<T: Float> IndexFunction<T> {
    /// Evaluates the index function of a prepared path. Splitting numbers come
    /// from one-sided evaluations at `δ` and `δ/2`; arcs are evaluated at their
    /// midpoints and must agree with the jumps.
    pub fn from_prepared(prep: &PreparedPath<T>, circle: &CircleSpectrum<T>, tol: &Tolerances) -> Result<Self> {
        let mut angles: Vec<T> = vec![T::ZERO];
        for e in &circle.eigenvalues {
            let a = e.angle();
            if a != T::ZERO {
                angles.push(a);
            }
        }
        let mut points = Vec::with_capacity(angles.len());
        for &a in &angles {
            let (value, nullity) = prep.index(unit(a))?;
            let (s_plus, s_minus) = if nullity == 0 && a != T::ZERO {
                (0, 0)
            } else {
                splitting_at(prep, a, value, isolation(a, &angles), tol)?
            };
            points.push(Breakpoint { angle: a, value, nullity, s_plus, s_minus });
        }
        let k = points.len();
        let mut arcs = Vec::with_capacity(k);
        for i in 0..k {
            let lo = points[i].angle;
            let hi = if i + 1 < k { points[i + 1].angle } else { T::two_pi() };
            let (v, _) = prep.index(unit((lo + hi) * T::HALF))?;
            let next = if i + 1 < k { &points[i + 1] } else { &points[0] };
            if v != points[i].value + points[i].s_plus || v != next.value + next.s_minus {
                return Err(Error::InvariantViolation(format!(
                    "index function jumps inconsistent on arc ({:.6}, {:.6}): arc {v}, left {}+{}, right {}+{}",
                    lo.to_f64_lossy(),
                    hi.to_f64_lossy(),
                    points[i].value,
                    points[i].s_plus,
                    next.value,
                    next.s_minus
                )));
            }
            arcs.push(v);
        }
        Ok(Self { n: prep.n(), points, arcs, match_tol: tol.rational_tol })
    }

    /// Rebuilds the function from `i₁` and the jumps at every circle
    /// eigenvalue (angles in `[0, 2π)`), as stored in profiles.
    pub fn from_jumps(n: usize, i1: i64, entries: &[(T, i64, i64, usize)], match_tol: f64) -> Result<Self> {
        let mut sorted: Vec<(T, i64, i64, usize)> = entries.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        if sorted.first().is_none_or(|e| e.0 != T::ZERO) {
            sorted.insert(0, (T::ZERO, 0, 0, 0));
        }
        let mut points = Vec::new();
        let mut arcs = Vec::new();
        let mut value = i1;
        for (i, &(a, sp, sm, nu)) in sorted.iter().enumerate() {
            if i > 0 {
                value = arcs[i - 1] - sm;
            }
            points.push(Breakpoint { angle: a, value, nullity: nu, s_plus: sp, s_minus: sm });
            arcs.push(value + sp);
        }
        if *arcs.last().unwrap() != points[0].value + points[0].s_minus {
            return Err(Error::InvariantViolation("splitting numbers do not close up around the circle".into()));
        }
        Ok(Self { n, points, arcs, match_tol })
    }

    fn locate(&self, theta: T) -> std::result::Result<usize, usize> {
        let turn = T::two_pi();
        let x = rem_euclid(theta, turn);
        let tol = lit::<T>(self.match_tol) * turn;
        for (i, p) in self.points.iter().enumerate() {
            let d = (x - p.angle).abs();
            if d <= tol || (turn - d) <= tol {
                return Ok(i);
            }
        }
        let arc = self.points.iter().rposition(|p| p.angle < x).unwrap_or(0);
        Err(arc)
    }

    pub fn value_at(&self, theta: T) -> i64 {
        match self.locate(theta) {
            Ok(i) => self.points[i].value,
            Err(a) => self.arcs[a],
        }
    }

    pub fn nullity_at(&self, theta: T) -> usize {
        match self.locate(theta) {
            Ok(i) => self.points[i].nullity,
            Err(_) => 0,
        }
    }

    /// `i(γ, m) = Σ_{ωᵐ = 1} i_ω(γ)`.
    pub fn iterate_index(&self, m: usize) -> i64 {
        (0..m)
            .map(|j| self.value_at(T::two_pi() * T::nat(j) / T::nat(m)))
            .sum()
    }

    /// `ν(γ, m) = Σ_{ωᵐ = 1} ν_ω(γ(τ))`.
    pub fn iterate_nullity(&self, m: usize) -> usize {
        (0..m)
            .map(|j| self.nullity_at(T::two_pi() * T::nat(j) / T::nat(m)))
            .sum()
    }

    /// Average of the index function over the circle, the limit of i(γ,m)/m.
    pub fn mean(&self) -> T {
        let k = self.points.len();
        let mut total = T::ZERO;
        for i in 0..k {
            let lo = self.points[i].angle;
            let hi = if i + 1 < k { self.points[i + 1].angle } else { T::two_pi() };
            total += lit::<T>(self.arcs[i] as f64) * (hi - lo);
        }
        total / T::two_pi()
    }

    pub fn i1(&self) -> i64 {
        self.points[0].value
    }
}

/// Half the circular distance from `theta` to the nearest other angle.
fn isolation<T: Float>(theta: T, others: &[T]) -> T {
    let turn = T::two_pi();
    let mut best = T::pi();
    for &a in others {
        let d = rem_euclid(a - theta, turn);
        let d = d.min(turn - d);
        if d > lit::<T>(1e-12) && d < best {
            best = d;
        }
    }
    best * T::HALF
}

/// `S±(ω) = i_{ωe^{±iδ}} − i_ω`, certified at `δ/2`. Near a Jordan block the
/// rank test can still see `ωe^{±iδ}` as an eigenvalue, so `δ` grows until
/// both sides are regular, staying below `limit`.
fn splitting_at<T: Float>(
    prep: &PreparedPath<T>,
    theta: T,
    value: i64,
    limit: T,
    tol: &Tolerances,
) -> Result<(i64, i64)> {
    // a side still seen as degenerate is skipped before any crossing count
    let side = |d: T| -> Result<Option<(i64, i64)>> {
        let (wp, wm) = (unit(theta + d), unit(theta - d));
        if nu_omega(prep.endpoint(), wp, tol) > 0 || nu_omega(prep.endpoint(), wm, tol) > 0 {
            return Ok(None);
        }
        Ok(Some((prep.index(wp)?.0 - value, prep.index(wm)?.0 - value)))
    };
    let mut delta = lit::<T>(tol.perturb_delta).min(limit * T::HALF);
    loop {
        if let (Some(a), Some(b)) = (side(delta)?, side(delta * T::HALF)?) {
            if a != b {
                return Err(Error::Stability {
                    what: "splitting number".into(),
                    first: a.0 * 1000 + a.1,
                    second: b.0 * 1000 + b.1,
                });
            }
            return Ok(a);
        }
        if delta * lit(4.0) > limit {
            return Err(Error::Resolution("no regular one-sided perturbation below the eigenvalue gap".into()));
        }
        delta *= lit(4.0);
    }
}

/// Splitting numbers `(S⁺, S⁻)` of `m` at `ω`, computed on `generator` and
/// re-checked on the canonical generator `t ↦ exp(t log M)` when that exists.
pub fn splitting_numbers<T: Float>(
    m: &SymplecticMatrix<T>,
    omega: Complex<T>,
    generator: &SymplecticPath<T>,
    tol: &Tolerances,
) -> Result<(i64, i64)> {
    let end = generator.endpoint().matrix();
    let gap = crate::linalg::max_abs(&(end - m.matrix()));
    let scale = crate::linalg::max_abs(m.matrix()).max(T::ONE);
    if gap > lit::<T>(tol.tol_symp) * scale {
        return Err(Error::Precondition("generator does not end at M".into()));
    }
    let theta = angle(omega);
    let prep = PreparedPath::new(generator, tol)?;
    let (value, _) = prep.index(unit(theta))?;
    let mut others: Vec<T> = spectrum(m, tol).circle.eigenvalues.iter().map(|e| e.angle()).collect();
    others.push(T::ZERO);
    let limit = isolation(theta, &others);
    let s = splitting_at(&prep, theta, value, limit, tol)?;
    if let Some(log) = crate::linalg::logm(m.matrix()) {
        let canonical = SymplecticPath::from_fn(T::ONE, 16, |t| {
            SymplecticMatrix::new_unchecked(crate::linalg::expm(&(&log * t)))
        });
        if let Ok(prep_c) = PreparedPath::new(&canonical, tol) {
            let (vc, _) = prep_c.index(unit(theta))?;
            let sc = splitting_at(&prep_c, theta, vc, limit, tol)?;
            if sc != s {
                return Err(Error::Stability {
                    what: "splitting numbers depend on the generator".into(),
                    first: s.0 * 1000 + s.1,
                    second: sc.0 * 1000 + sc.1,
                });
            }
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationEntry {
    pub m: usize,
    pub index: i64,
    pub nullity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingEntry<T: Float> {
    pub omega: Complex<T>,
    pub s_plus: i64,
    pub s_minus: i64,
    pub nullity: usize,
}

/// Index data of one symplectic path.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexProfile<T: Float> {
    pub n: usize,
    pub i1: i64,
    pub nu1: usize,
    pub table: Vec<IterationEntry>,
    /// Circle average of the index function.
    pub mean_index: T,
    /// Mean index from the normal form decomposition, when it exists.
    pub mean_index_check: Option<T>,
    pub single_source: bool,
    pub splitting: Vec<SplittingEntry<T>>,
    pub k: MinimalPeriod,
    pub function: IndexFunction<T>,
}

impl<T: Float> IndexProfile<T> {
    /// `i(γ, m)` for any m, from the table when present, else by the Bott sum.
    pub fn index(&self, m: usize) -> i64 {
        self.table
            .iter()
            .find(|e| e.m == m)
            .map_or_else(|| self.function.iterate_index(m), |e| e.index)
    }

    pub fn nullity(&self, m: usize) -> usize {
        self.table
            .iter()
            .find(|e| e.m == m)
            .map_or_else(|| self.function.iterate_nullity(m), |e| e.nullity)
    }

    pub fn m_max(&self) -> usize {
        self.table.iter().map(|e| e.m).max().unwrap_or(0)
    }

    /// Checks `|i(γ,m) − m·î| ≤ 2n` on the table.
    pub fn check_mean_bound(&self) -> Result<()> {
        let bound = lit::<T>((2 * self.n) as f64);
        for e in &self.table {
            let dev = (lit::<T>(e.index as f64) - T::nat(e.m) * self.mean_index).abs();
            if dev > bound + lit(1e-9) {
                return Err(Error::InvariantViolation(format!(
                    "|i(γ,{}) − {}·î| = {:.6} exceeds 2n = {}",
                    e.m,
                    e.m,
                    dev.to_f64_lossy(),
                    2 * self.n
                )));
            }
        }
        Ok(())
    }
}

fn circle_angles<T: Float>(c: &CircleSpectrum<T>) -> Vec<f64> {
    c.eigenvalues.iter().map(|e| e.angle().to_f64_lossy()).collect()
}

/// Iteration table for `m = 1..=m_max`, index function, splitting numbers,
/// mean index (two sources) and K.
pub fn iteration_profile<T: Float>(gamma: &SymplecticPath<T>, m_max: usize, tol: &Tolerances) -> Result<IndexProfile<T>> {
    if m_max < 2 {
        return Err(Error::Precondition("m_max must be at least 2".into()));
    }
    let prep = PreparedPath::new(gamma, tol)?;
    let sp = spectrum(gamma.endpoint(), tol);
    let function = IndexFunction::from_prepared(&prep, &sp.circle, tol)?;
    let (i1, nu1) = (function.points[0].value, function.points[0].nullity);
    let mut table = vec![IterationEntry { m: 1, index: i1, nullity: nu1 }];
    for m in 2..=m_max {
        let (index, nullity) = omega_index(&iterate_path(gamma, m), Complex::new(T::ONE, T::ZERO), tol)?;
        table.push(IterationEntry { m, index, nullity });
    }
    let mean_index = function.mean();
    let (mean_index_check, single_source) = match normal_form_decomposition(gamma.endpoint(), tol) {
        Ok(nfs) => {
            let b = mean_index_from_normal_forms(i1, &nfs);
            if (b - mean_index).abs() > lit(tol.mean_tol) {
                return Err(Error::Consistency { a: mean_index.to_f64_lossy(), b: b.to_f64_lossy() });
            }
            (Some(b), false)
        }
        Err(Error::UnsupportedNormalForm(_)) => (None, true),
        Err(e) => return Err(e),
    };
    let splitting = function
        .points
        .iter()
        .filter(|p| sp.circle.eigenvalues.iter().any(|e| (e.angle() - p.angle).abs() <= lit(1e-12)))
        .map(|p| SplittingEntry { omega: p.omega(), s_plus: p.s_plus, s_minus: p.s_minus, nullity: p.nullity })
        .collect();
    let k = MinimalPeriod::from_angles(&circle_angles(&sp.circle), tol.q_max, tol.rational_tol);
    let profile = IndexProfile {
        n: gamma.n(),
        i1,
        nu1,
        table,
        mean_index,
        mean_index_check,
        single_source,
        splitting,
        k,
        function,
    };
    profile.check_mean_bound()?;
    Ok(profile)
}

/// Ekeland indices `(m, i(yᵐ), ν(yᵐ)) = (m, i(y,m) − n, ν(y,m))`.
pub fn ekeland_index<T: Float>(profile: &IndexProfile<T>, n: usize) -> Vec<IterationEntry> {
    profile
        .table
        .iter()
        .map(|e| IterationEntry { m: e.m, index: e.index - n as i64, nullity: e.nullity })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::synthetic::{composite_path, normal_form_path};
    use crate::symplectic::{realize, BasicNormalForm};

    fn one() -> Complex<f64> {
        Complex::new(1.0, 0.0)
    }

    #[test]
    fn splitting_of_n1_at_one() {
        let tol = Tolerances::default();
        for w in 0..3 {
            for (b, expect) in [(1, (1, 1)), (0, (1, 1)), (-1, (0, 0))] {
                let nf = BasicNormalForm::N1 { lambda: 1, b };
                let g = normal_form_path(&nf, w, 24).unwrap();
                let s = splitting_numbers(&realize(&nf).unwrap(), one(), &g, &tol).unwrap();
                assert_eq!(s, expect, "b = {b}, winding {w}");
            }
        }
    }

    #[test]
    fn splitting_of_n1_at_minus_one() {
        let tol = Tolerances::default();
        let minus = Complex::new(-1.0, 0.0);
        for w in 0..2 {
            for (b, expect) in [(1, (0, 0)), (0, (1, 1)), (-1, (1, 1))] {
                let nf = BasicNormalForm::N1 { lambda: -1, b };
                let g = normal_form_path(&nf, w, 24).unwrap();
                let s = splitting_numbers(&realize(&nf).unwrap(), minus, &g, &tol).unwrap();
                assert_eq!(s, expect, "b = {b}, winding {w}");
            }
        }
    }

    #[test]
    fn splitting_of_rotation() {
        let tol = Tolerances::default();
        let theta = 2.1;
        let nf = BasicNormalForm::R { theta };
        let g = normal_form_path(&nf, 1, 24).unwrap();
        let m = realize(&nf).unwrap();
        assert_eq!(splitting_numbers(&m, unit(theta), &g, &tol).unwrap(), (0, 1));
        assert_eq!(splitting_numbers(&m, unit(-theta), &g, &tol).unwrap(), (1, 0));
        assert_eq!(splitting_numbers(&m, one(), &g, &tol).unwrap(), (0, 0));
        assert_eq!(splitting_numbers(&m, unit(1.0), &g, &tol).unwrap(), (0, 0));
    }

    #[test]
    fn profile_of_shear_product() {
        let tol = Tolerances::default();
        let factors: [(BasicNormalForm<f64>, usize); 3] = [
            (BasicNormalForm::N1 { lambda: 1, b: 1 }, 1),
            (BasicNormalForm::N1 { lambda: 1, b: -1 }, 1),
            (BasicNormalForm::N1 { lambda: 1, b: -1 }, 0),
        ];
        let g = composite_path(&factors, 32, None).unwrap();
        let p = iteration_profile(&g, 4, &tol).unwrap();
        for e in &p.table {
            assert_eq!(e.index, 4 * e.m as i64 - 1, "m = {}", e.m);
            assert_eq!(e.nullity, 3);
        }
        assert!((p.mean_index - 4.0).abs() < 1e-9);
        assert_eq!(p.mean_index_check, Some(4.0));
    }
}
