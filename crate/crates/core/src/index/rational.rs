//! Rational rotation angles and the minimal period K.

use serde::{Deserialize, Serialize};

/// Best rational approximation p/q of `x` with `q ≤ q_max` from continued
/// fraction convergents, accepted when `|x − p/q| ≤ tol`.
pub fn detect_rational(x: f64, q_max: u64, tol: f64) -> Option<(i64, u64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = (ai.max(0) as u64).checked_mul(k1)?.checked_add(k0)?;
        if k2 > q_max {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a;
        if frac <= f64::EPSILON {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// K(y): twice the lcm of denominators of rotation angles detected rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MinimalPeriod {
    Finite(u64),
    #[serde(with = "unbounded_marker")]
    Unbounded,
}

mod unbounded_marker {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub const MARKER: &str = "unbounded-denominator";

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(MARKER)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == MARKER {
            Ok(())
        } else {
            Err(D::Error::custom(format!("expected \"{MARKER}\"")))
        }
    }
}

/// Largest K represented exactly; beyond it the marker is used.
pub const K_CAP: u64 = 1 << 20;

impl MinimalPeriod {
    /// `angles` are rotation angles θ ∈ [0, 2π) of the circle spectrum.
    pub fn from_angles(angles: &[f64], q_max: u64, tol: f64) -> Self {
        let mut l = 1u64;
        for &theta in angles {
            let x = theta / std::f64::consts::TAU;
            if let Some((_, q)) = detect_rational(x, q_max, tol) {
                l = l / gcd(l, q) * q;
                if l > K_CAP {
                    return Self::Unbounded;
                }
            }
        }
        Self::Finite(2 * l)
    }

    pub fn finite(&self) -> Option<u64> {
        match *self {
            Self::Finite(k) => Some(k),
            Self::Unbounded => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergents() {
        assert_eq!(detect_rational(3.0 / 7.0, 64, 1e-9), Some((3, 7)));
        assert_eq!(detect_rational(0.0, 64, 1e-9), Some((0, 1)));
        assert_eq!(detect_rational(0.5, 64, 1e-9), Some((1, 2)));
        assert_eq!(detect_rational((5f64.sqrt() - 1.0) / 2.0, 64, 1e-9), None);
        assert_eq!(detect_rational(1.0 / 97.0, 64, 1e-9), None);
    }

    #[test]
    fn minimal_period() {
        let tau = std::f64::consts::TAU;
        assert_eq!(MinimalPeriod::from_angles(&[], 64, 1e-9), MinimalPeriod::Finite(2));
        assert_eq!(MinimalPeriod::from_angles(&[0.0, 1.0], 64, 1e-9), MinimalPeriod::Finite(2));
        assert_eq!(
            MinimalPeriod::from_angles(&[tau * 3.0 / 7.0, tau * 4.0 / 7.0, std::f64::consts::PI], 64, 1e-9),
            MinimalPeriod::Finite(28)
        );
        // an angle just below 2π is rational with p/q = 1
        assert_eq!(MinimalPeriod::from_angles(&[tau - 1e-12], 64, 1e-9), MinimalPeriod::Finite(2));
    }

    #[test]
    fn marker_json() {
        assert_eq!(serde_json::to_string(&MinimalPeriod::Unbounded).unwrap(), "\"unbounded-denominator\"");
        assert_eq!(serde_json::to_string(&MinimalPeriod::Finite(4)).unwrap(), "4");
        let k: MinimalPeriod = serde_json::from_str("\"unbounded-denominator\"").unwrap();
        assert_eq!(k, MinimalPeriod::Unbounded);
        let k: MinimalPeriod = serde_json::from_str("6").unwrap();
        assert_eq!(k, MinimalPeriod::Finite(6));
    }
}
