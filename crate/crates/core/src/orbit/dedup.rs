//! Grouping orbits by their point sets.

use crate::error::{Error, Result};
use crate::orbit::characteristic::{hermite, ClosedCharacteristic};
use crate::scalar::{lit, Float};

/// Relative Hausdorff tolerance.
pub const DEDUP_TOL: f64 = 1e-6;
/// Snap tolerance for period ratios.
pub const RATIO_TOL: f64 = 1e-6;

/// Distance from `p` to the Hermite curve through the samples of `c`.
fn distance_to_curve<T: Float>(c: &ClosedCharacteristic<T>, p: &nalgebra::DVector<T>) -> T {
    let m = c.samples();
    let (mut best, mut at) = (lit::<T>(f64::INFINITY), 0);
    for k in 0..m {
        let d = (&c.points[k] - p).norm();
        if d < best {
            best = d;
            at = k;
        }
    }
    let h = c.tau / T::nat(m);
    for seg in [(at + m - 1) % m, at] {
        let seg_d = |s: T| {
            (hermite(&c.points[seg], &c.velocities[seg], &c.points[seg + 1], &c.velocities[seg + 1], h, s) - p).norm()
        };
        // golden-section search on the segment parameter
        let g = lit::<T>(0.618_033_988_749_894_9);
        let (mut lo, mut hi) = (T::ZERO, T::ONE);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (seg_d(x1), seg_d(x2));
        for _ in 0..80 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = seg_d(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = seg_d(x2);
            }
        }
        best = best.min(f1.min(f2)).min(seg_d(T::ZERO)).min(seg_d(T::ONE));
    }
    best
}

/// Symmetric Hausdorff distance between the sampled point sets.
pub fn hausdorff<T: Float>(a: &ClosedCharacteristic<T>, b: &ClosedCharacteristic<T>) -> T {
    let one = a.points[..a.samples()].iter().map(|p| distance_to_curve(b, p)).fold(T::ZERO, |x, y| x.max(y));
    let two = b.points[..b.samples()].iter().map(|p| distance_to_curve(a, p)).fold(T::ZERO, |x, y| x.max(y));
    one.max(two)
}

/// A geometrically distinct orbit with the other inputs that trace it.
#[derive(Debug, Clone)]
pub struct OrbitGroup<T: Float> {
    pub prime: ClosedCharacteristic<T>,
    /// Iterates, with `multiplicity` set to the period ratio.
    pub iterates: Vec<ClosedCharacteristic<T>>,
}

/// Integer `m` with `τ_b/τ_a ≈ m`, or an ambiguity error.
pub fn period_ratio(tau_a: f64, tau_b: f64) -> Result<usize> {
    let r = tau_b / tau_a;
    let m = r.round();
    if m >= 1.0 && (r - m).abs() <= RATIO_TOL * m {
        Ok(m as usize)
    } else {
        Err(Error::Ambiguity(r))
    }
}

/// Groups orbits with the same point set (Hausdorff distance below
/// `DEDUP_TOL` times the diameter). Each group keeps the shortest period,
/// preferring analytic over shooting over dual-action results on ties.
pub fn group_orbits<T: Float>(orbits: Vec<ClosedCharacteristic<T>>) -> Result<Vec<OrbitGroup<T>>> {
    let mut groups: Vec<Vec<ClosedCharacteristic<T>>> = Vec::new();
    for o in orbits {
        let scale = o.diameter();
        let found = groups.iter().position(|g| {
            let d = hausdorff(&g[0], &o);
            d <= lit::<T>(DEDUP_TOL) * scale.max(g[0].diameter())
        });
        match found {
            Some(i) => groups[i].push(o),
            None => groups.push(vec![o]),
        }
    }
    let mut out = Vec::with_capacity(groups.len());
    for mut g in groups {
        g.sort_by(|x, y| x.tau.partial_cmp(&y.tau).unwrap_or(std::cmp::Ordering::Equal));
        let base = g[0].tau.to_f64_lossy();
        let mut annotated = Vec::with_capacity(g.len());
        for o in g {
            let m = period_ratio(base, o.tau.to_f64_lossy())?;
            annotated.push((m, o));
        }
        annotated.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.source.cmp(&y.1.source)));
        let mut it = annotated.into_iter();
        let (_, mut prime) = it.next().unwrap();
        prime.multiplicity = 1;
        let iterates = it
            .map(|(m, mut o)| {
                o.multiplicity = m;
                o
            })
            .collect();
        out.push(OrbitGroup { prime, iterates });
    }
    Ok(out)
}

/// Geometrically distinct orbits, one prime representative each.
pub fn deduplicate<T: Float>(orbits: Vec<ClosedCharacteristic<T>>) -> Result<Vec<ClosedCharacteristic<T>>> {
    Ok(group_orbits(orbits)?.into_iter().map(|g| g.prime).collect())
}
