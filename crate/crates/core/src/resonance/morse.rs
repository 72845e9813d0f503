//! Morse-type counts `w_h` and the alternating sum `M^I(−1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonance::CriticalTypeNumbers;

/// Cutoffs used for the slope fit.
pub const SLOPE_GRID: [usize; 4] = [250, 500, 1000, 2000];

/// One prime orbit: Ekeland indices `i(yᵐ)` for `m = 1..=indices.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseInput {
    pub id: usize,
    pub indices: Vec<i64>,
    pub mean_index: f64,
    pub big_k: usize,
    pub k: CriticalTypeNumbers,
}

impl MorseInput {
    /// Iterations needed so that every `m` with `i(yᵐ) ≤ cutoff + 1` is listed.
    pub fn required_depth(&self, cutoff: usize, n: usize) -> usize {
        ((cutoff as f64 + 1.0 + 2.0 * n as f64) / self.mean_index).floor() as usize + 1
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.k.k.iter().enumerate().flat_map(|(m, row)| {
            row.iter().enumerate().filter(|(_, &v)| v != 0).map(move |(l, &v)| (m + 1, l, v))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseTable {
    pub cutoff: usize,
    /// `w_h` for `h = 0..=cutoff+1`.
    pub w: Vec<u64>,
    pub m_minus_one: i64,
    /// `Σ_j Σ_{m,l} k_l(u_jᵐ)(4n/(K_j î_j) + 2)`.
    pub w_bound: f64,
    /// `I · Σ χ̂/î`.
    pub expected: f64,
}

/// `w_h = Σ_{j,l,m≤K} k_l(u_jᵐ) #{s ≥ 0 : i(u_j^{sK+m}) + l = h}` for `h ≤ I+1`
/// and `M^I(−1) = Σ_{h≤I} (−1)^h w_h`.
pub fn morse_counts(inputs: &[MorseInput], n: usize, cutoff: usize) -> Result<MorseTable> {
    let required = inputs.iter().map(|o| o.required_depth(cutoff, n)).max().unwrap_or(0);
    if inputs.iter().any(|o| o.indices.len() < o.required_depth(cutoff, n)) {
        return Err(Error::Depth { required });
    }
    let mut w = vec![0u64; cutoff + 2];
    let mut w_bound = 0.0;
    let mut expected = 0.0;
    for o in inputs {
        if o.big_k == 0 || o.k.k.len() < o.big_k {
            return Err(Error::Precondition(format!("orbit {} needs K rows of critical type numbers", o.id)));
        }
        let kk = o.big_k;
        for (m, l, v) in o.terms().filter(|t| t.0 <= kk) {
            w_bound += v as f64 * (4.0 * n as f64 / (kk as f64 * o.mean_index) + 2.0);
            let sign = if (o.indices[m - 1] + l as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            expected += sign * v as f64 / (kk as f64 * o.mean_index);
            let mut it = m;
            while it <= o.indices.len() {
                let h = o.indices[it - 1] + l as i64;
                if h >= 0 && (h as usize) <= cutoff + 1 {
                    w[h as usize] += v as u64;
                }
                it += kk;
            }
        }
    }
    let m_minus_one = w[..=cutoff].iter().enumerate().map(|(h, &v)| if h % 2 == 0 { v as i64 } else { -(v as i64) }).sum();
    Ok(MorseTable { cutoff, w, m_minus_one, w_bound, expected: expected * cutoff as f64 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseSeries {
    pub tables: Vec<MorseTable>,
    /// Least-squares slope of `M^I(−1)` against `I`.
    pub slope: f64,
    /// `max_I |M^I(−1) − I Σ χ̂/î|`.
    pub max_deviation: f64,
}

pub fn morse_series(inputs: &[MorseInput], n: usize, grid: &[usize]) -> Result<MorseSeries> {
    let tables = grid.iter().map(|&i| morse_counts(inputs, n, i)).collect::<Result<Vec<_>>>()?;
    let k = tables.len() as f64;
    let xs: Vec<f64> = tables.iter().map(|t| t.cutoff as f64).collect();
    let ys: Vec<f64> = tables.iter().map(|t| t.m_minus_one as f64).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let max_deviation = tables.iter().map(|t| (t.m_minus_one as f64 - t.expected).abs()).fold(0.0, f64::max);
    Ok(MorseSeries { tables, slope, max_deviation })
}
