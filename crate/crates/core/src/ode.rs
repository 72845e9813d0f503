//! Dormand–Prince 8(5,3) explicit Runge–Kutta integrator with step control.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::{lit, Float};

const C: [f64; 12] = [
    0.0,
    0.526001519587677318785587544488E-01,
    0.789002279381515978178381316732E-01,
    0.118350341907227396726757197510E+00,
    0.281649658092772603273242802490E+00,
    0.333333333333333333333333333333E+00,
    0.25E+00,
    0.307692307692307692307692307692E+00,
    0.651282051282051282051282051282E+00,
    0.6E+00,
    0.857142857142857142857142857142E+00,
    1.0,
];

const A: [&[(usize, f64)]; 12] = [
    &[],
    &[(0, 5.26001519587677318785587544488E-2)],
    &[(0, 1.97250569845378994544595329183E-2), (1, 5.91751709536136983633785987549E-2)],
    &[(0, 2.95875854768068491816892993775E-2), (2, 8.87627564304205475450678981324E-2)],
    &[
        (0, 2.41365134159266685502369798665E-1),
        (2, -8.84549479328286085344864962717E-1),
        (3, 9.24834003261792003115737966543E-1),
    ],
    &[
        (0, 3.7037037037037037037037037037E-2),
        (3, 1.70828608729473871279604482173E-1),
        (4, 1.25467687566822425016691814123E-1),
    ],
    &[
        (0, 3.7109375E-2),
        (3, 1.70252211019544039314978060272E-1),
        (4, 6.02165389804559606850219397283E-2),
        (5, -1.7578125E-2),
    ],
    &[
        (0, 3.70920001185047927108779319836E-2),
        (3, 1.70383925712239993810214054705E-1),
        (4, 1.07262030446373284651809199168E-1),
        (5, -1.53194377486244017527936158236E-2),
        (6, 8.27378916381402288758473766002E-3),
    ],
    &[
        (0, 6.24110958716075717114429577812E-1),
        (3, -3.36089262944694129406857109825E0),
        (4, -8.68219346841726006818189891453E-1),
        (5, 2.75920996994467083049415600797E1),
        (6, 2.01540675504778934086186788979E1),
        (7, -4.34898841810699588477366255144E1),
    ],
    &[
        (0, 4.77662536438264365890433908527E-1),
        (3, -2.48811461997166764192642586468E0),
        (4, -5.90290826836842996371446475743E-1),
        (5, 2.12300514481811942347288949897E1),
        (6, 1.52792336328824235832596922938E1),
        (7, -3.32882109689848629194453265587E1),
        (8, -2.03312017085086261358222928593E-2),
    ],
    &[
        (0, -9.3714243008598732571704021658E-1),
        (3, 5.18637242884406370830023853209E0),
        (4, 1.09143734899672957818500254654E0),
        (5, -8.14978701074692612513997267357E0),
        (6, -1.85200656599969598641566180701E1),
        (7, 2.27394870993505042818970056734E1),
        (8, 2.49360555267965238987089396762E0),
        (9, -3.0467644718982195003823669022E0),
    ],
    &[
        (0, 2.27331014751653820792359768449E0),
        (3, -1.05344954667372501984066689879E1),
        (4, -2.00087205822486249909675718444E0),
        (5, -1.79589318631187989172765950534E1),
        (6, 2.79488845294199600508499808837E1),
        (7, -2.85899827713502369474065508674E0),
        (8, -8.87285693353062954433549289258E0),
        (9, 1.23605671757943030647266201528E1),
        (10, 6.43392746015763530355970484046E-1),
    ],
];

const B: [(usize, f64); 8] = [
    (0, 5.42937341165687622380535766363E-2),
    (5, 4.45031289275240888144113950566E0),
    (6, 1.89151789931450038304281599044E0),
    (7, -5.8012039600105847814672114227E0),
    (8, 3.1116436695781989440891606237E-1),
    (9, -1.52160949662516078556178806805E-1),
    (10, 2.01365400804030348374776537501E-1),
    (11, 4.47106157277725905176885569043E-2),
];

const BHH: [(usize, f64); 3] = [
    (0, 0.244094488188976377952755905512E+00),
    (8, 0.733846688281611857341361741547E+00),
    (11, 0.220588235294117647058823529412E-01),
];

const ER: [(usize, f64); 8] = [
    (0, 0.1312004499419488073250102996E-01),
    (5, -0.1225156446376204440720569753E+01),
    (6, -0.4957589496572501915214079952E+00),
    (7, 0.1664377182454986536961530415E+01),
    (8, -0.3503288487499736816886487290E+00),
    (9, 0.3341791187130174790297318841E+00),
    (10, 0.8192320648511571246570742613E-01),
    (11, -0.2235530786388629525884427845E-01),
];

/// One accepted step, handed to observers.
#[derive(Debug, Clone)]
pub struct StepData<'a, T: Float> {
    pub t0: T,
    pub y0: &'a DVector<T>,
    pub f0: &'a DVector<T>,
    pub t1: T,
    pub y1: &'a DVector<T>,
    pub f1: &'a DVector<T>,
}

impl<T: Float> StepData<'_, T> {
    /// Cubic Hermite interpolant across the step.
    pub fn hermite(&self, t: T) -> DVector<T> {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::TWO;
        let three = lit::<T>(3.0);
        let h00 = two * s3 - three * s2 + T::ONE;
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        self.y0 * h00 + self.f0 * (h10 * h) + self.y1 * h01 + self.f1 * (h11 * h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

/// Adaptive DOP853 stepper with mixed absolute/relative tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Dop853<T: Float> {
    pub rtol: T,
    pub atol: T,
    pub h_max: Option<T>,
    pub max_steps: usize,
}

impl<T: Float> Default for Dop853<T> {
    fn default() -> Self {
        Self { rtol: lit(1e-12), atol: lit(1e-12), h_max: None, max_steps: 1_000_000 }
    }
}

impl<T: Float> Dop853<T> {
    pub fn new(rtol: T, atol: T) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    fn weight(&self, a: &DVector<T>, b: &DVector<T>, i: usize) -> T {
        self.atol + self.rtol * a[i].abs().max(b[i].abs())
    }

    fn initial_step<F>(&self, f: &F, t0: T, y0: &DVector<T>, f0: &DVector<T>, span: T) -> Result<T>
    where
        F: Fn(T, &DVector<T>) -> Result<DVector<T>>,
    {
        let n = T::nat(y0.len());
        let norm = |v: &DVector<T>| -> T {
            let s = (0..v.len()).fold(T::ZERO, |acc, i| {
                let w = self.weight(y0, y0, i);
                acc + (v[i] / w) * (v[i] / w)
            });
            (s / n).sqrt()
        };
        let d0 = norm(y0);
        let d1 = norm(f0);
        let mut h0 = if d0 < lit(1e-10) || d1 < lit(1e-10) { lit(1e-6) } else { lit::<T>(0.01) * d0 / d1 };
        h0 = h0.min(span);
        let y1 = y0 + f0 * h0;
        let f1 = f(t0 + h0, &y1)?;
        let d2 = norm(&(&f1 - f0)) / h0;
        let m = d1.max(d2);
        let h1 = if m <= lit(1e-15) {
            (h0 * lit(1e-3)).max(lit(1e-6))
        } else {
            (lit::<T>(0.01) / m).powf(lit(1.0 / 8.0))
        };
        Ok((h0 * lit(100.0)).min(h1).min(span))
    }

    /// Integrates from `t0` to `t_end`, calling `observer` after every accepted
    /// step. Steps are clamped to land on every time in `stops` exactly.
    pub fn integrate<F, O>(
        &self,
        f: &F,
        t0: T,
        y0: &DVector<T>,
        t_end: T,
        stops: &[T],
        mut observer: O,
    ) -> Result<(T, DVector<T>, Stats)>
    where
        F: Fn(T, &DVector<T>) -> Result<DVector<T>>,
        O: FnMut(&StepData<T>) -> Control,
    {
        let span = t_end - t0;
        if !(span > T::ZERO) {
            return Ok((t0, y0.clone(), Stats::default()));
        }
        let dim = y0.len();
        let mut stats = Stats::default();
        let mut t = t0;
        let mut y = y0.clone();
        let mut k1 = f(t, &y)?;
        stats.evals += 1;
        let h_max = self.h_max.unwrap_or(span).min(span);
        let mut h = self.initial_step(f, t, &y, &k1, span)?.min(h_max);
        let mut next_stop = stops.iter().position(|&s| s > t0);
        let mut last_rejected = false;
        let mut k: Vec<DVector<T>> = vec![DVector::zeros(dim); 12];
        while t < t_end {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::Integrator(format!("step budget exhausted at t = {:e}", t.to_f64_lossy())));
            }
            let mut target = t_end;
            if let Some(i) = next_stop {
                if stops[i] < target {
                    target = stops[i];
                }
            }
            let mut hs = h;
            let clamped = t + hs >= target - T::EPS * lit::<T>(16.0) * target.abs().max(T::ONE);
            if clamped {
                hs = target - t;
            }
            if hs.abs() <= T::EPS * t.abs().max(T::ONE) {
                return Err(Error::Integrator(format!("step size underflow at t = {:e}", t.to_f64_lossy())));
            }
            k[0] = k1.clone();
            for s in 1..12 {
                let mut ys = y.clone();
                for &(j, a) in A[s] {
                    ys.axpy(lit::<T>(a) * hs, &k[j], T::ONE);
                }
                k[s] = f(t + lit::<T>(C[s]) * hs, &ys)?;
            }
            stats.evals += 11;
            let mut incr = DVector::zeros(dim);
            for &(j, b) in &B {
                incr.axpy(lit::<T>(b), &k[j], T::ONE);
            }
            let y_new = &y + &incr * hs;
            let mut err = T::ZERO;
            let mut err2 = T::ZERO;
            for i in 0..dim {
                let sk = self.weight(&y, &y_new, i);
                let mut e2 = incr[i];
                for &(j, c) in &BHH {
                    e2 -= lit::<T>(c) * k[j][i];
                }
                err2 += (e2 / sk) * (e2 / sk);
                let mut e = T::ZERO;
                for &(j, c) in &ER {
                    e += lit::<T>(c) * k[j][i];
                }
                err += (e / sk) * (e / sk);
            }
            let mut deno = err + lit::<T>(0.01) * err2;
            if deno <= T::ZERO {
                deno = T::ONE;
            }
            let err = hs.abs() * err * (T::ONE / (deno * T::nat(dim))).sqrt();
            if !err.is_finite() {
                h = hs * lit(0.1);
                stats.rejected += 1;
                last_rejected = true;
                continue;
            }
            let fac11 = err.powf(lit(0.125));
            let fac = lit::<T>(1.0 / 6.0).max(lit::<T>(3.0).min(fac11 / lit(0.9)));
            let mut h_new = hs / fac;
            if err <= T::ONE {
                stats.accepted += 1;
                let f_new = f(t + hs, &y_new)?;
                stats.evals += 1;
                let t_new = if clamped { target } else { t + hs };
                let ctl = observer(&StepData { t0: t, y0: &y, f0: &k1, t1: t_new, y1: &y_new, f1: &f_new });
                t = t_new;
                y = y_new;
                k1 = f_new;
                if clamped {
                    if let Some(i) = next_stop {
                        if target == stops[i] {
                            next_stop = stops.iter().position(|&s| s > t);
                        }
                    }
                }
                if last_rejected {
                    h_new = h_new.min(hs);
                }
                last_rejected = false;
                if ctl == Control::Stop {
                    return Ok((t, y, stats));
                }
                // keep the uncapped proposal when the step was shortened to hit a stop
                h = if clamped { h.max(h_new).min(h_max) } else { h_new.min(h_max) };
            } else {
                h_new = hs / lit::<T>(3.0).min(fac11 / lit(0.9));
                stats.rejected += 1;
                last_rejected = true;
                h = h_new;
            }
        }
        Ok((t, y, stats))
    }

    /// Values at the requested increasing times (first may equal `t0`).
    pub fn solve_at<F>(&self, f: &F, t0: T, y0: &DVector<T>, times: &[T]) -> Result<Vec<DVector<T>>>
    where
        F: Fn(T, &DVector<T>) -> Result<DVector<T>>,
    {
        let mut out = Vec::with_capacity(times.len());
        let mut idx = 0;
        while idx < times.len() && times[idx] <= t0 {
            out.push(y0.clone());
            idx += 1;
        }
        let Some(&t_end) = times.last() else { return Ok(out) };
        if idx == times.len() {
            return Ok(out);
        }
        let rest = &times[idx..];
        self.integrate(f, t0, y0, t_end, rest, |s| {
            if idx < times.len() && s.t1 == times[idx] {
                out.push(s.y1.clone());
                idx += 1;
            }
            Control::Continue
        })?;
        if out.len() != times.len() {
            return Err(Error::Integrator("requested output times were not all reached".into()));
        }
        Ok(out)
    }
}
