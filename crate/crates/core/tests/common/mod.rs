#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use closed_char::index::synthetic::normal_form_path;
use closed_char::index::{omega_index, splitting_numbers, SymplecticPath};
use closed_char::symplectic::{realize, unit, BasicNormalForm, SymplecticMatrix};
use closed_char::Tolerances;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `exp(JS)` for a random symmetric `S` with entries of size ≤ `scale`.
pub fn random_symplectic(rng: &mut impl Rng, n: usize, scale: f64) -> SymplecticMatrix<f64> {
    let s = DMatrix::from_fn(2 * n, 2 * n, |_, _| rng.random_range(-scale..scale));
    SymplecticMatrix::exp_hamiltonian(&s).unwrap()
}

/// Rotation angles in (0,π)∪(π,2π), half of them rational with small denominators.
pub fn random_angle(rng: &mut impl Rng) -> f64 {
    if rng.random_bool(0.5) {
        let q = rng.random_range(3..=7u32);
        let p = loop {
            let p = rng.random_range(1..q);
            if 2 * p != q {
                break p;
            }
        };
        TAU * p as f64 / q as f64
    } else {
        loop {
            let t = rng.random_range(0.05..TAU - 0.05);
            if (t - PI).abs() > 0.05 {
                break t;
            }
        }
    }
}

pub fn random_form(rng: &mut impl Rng) -> BasicNormalForm<f64> {
    let sign = |rng: &mut dyn rand::RngCore| if rng.random_bool(0.5) { 1i8 } else { -1 };
    match rng.random_range(0..3) {
        0 => BasicNormalForm::D { lambda: 2 * sign(rng) },
        1 => BasicNormalForm::N1 { lambda: sign(rng), b: rng.random_range(-1..=1) },
        _ => BasicNormalForm::R { theta: random_angle(rng) },
    }
}

/// 1 to `max_n` one-dimensional factors with windings in 0..=2.
pub fn random_factors(rng: &mut impl Rng, max_n: usize) -> Vec<(BasicNormalForm<f64>, usize)> {
    let k = rng.random_range(1..=max_n);
    (0..k).map(|_| (random_form(rng), rng.random_range(0..=2))).collect()
}

pub fn basic_form() -> impl Strategy<Value = BasicNormalForm<f64>> {
    let sign = prop_oneof![Just(1i8), Just(-1i8)];
    prop_oneof![
        sign.clone().prop_map(|s| BasicNormalForm::D { lambda: 2 * s }),
        (sign, -1i8..=1).prop_map(|(lambda, b)| BasicNormalForm::N1 { lambda, b }),
        (0.05f64..TAU - 0.05)
            .prop_filter("θ ≠ π", |t| (t - PI).abs() > 0.05)
            .prop_map(|theta| BasicNormalForm::R { theta }),
    ]
}

/// Circle eigenvalue angles of a one-dimensional basic form.
pub fn form_angles(nf: &BasicNormalForm<f64>) -> Vec<f64> {
    match *nf {
        BasicNormalForm::D { .. } => vec![],
        BasicNormalForm::N1 { lambda, .. } => vec![if lambda > 0 { 0.0 } else { PI }],
        BasicNormalForm::R { theta } => vec![theta, TAU - theta],
        BasicNormalForm::N2 { theta, .. } => vec![theta, TAU - theta],
    }
}

/// Samples per factor path.
pub const SAMPLES: usize = 24;

/// Splitting numbers of every factor, computed on its own path, summed at `θ`.
pub fn summed_splitting(factors: &[(BasicNormalForm<f64>, usize)], theta: f64, tol: &Tolerances) -> (i64, i64) {
    factors.iter().fold((0, 0), |acc, (nf, w)| {
        let g = normal_form_path(nf, *w, SAMPLES).unwrap();
        let s = splitting_numbers(&realize(nf).unwrap(), unit(theta), &g, tol).unwrap();
        (acc.0 + s.0, acc.1 + s.1)
    })
}

/// `Σ_{ωᵐ=1} i_ω(γ)` and the matching nullity sum.
pub fn bott_sum(g: &SymplecticPath<f64>, m: usize, tol: &Tolerances) -> Result<(i64, usize), String> {
    (0..m).try_fold((0, 0), |acc, k| {
        let (i, nu) = omega_index(g, unit(TAU * k as f64 / m as f64), tol).map_err(|e| format!("ω = e^(2πi·{k}/{m}): {e}"))?;
        Ok((acc.0 + i, acc.1 + nu))
    })
}

/// Independent reading of the exclusion rules for one degenerate iterate.
pub fn admissible(row: &[u32], nu: usize) -> bool {
    let top = nu - 1;
    let support = row.iter().enumerate().all(|(l, &v)| l < nu || v == 0);
    let ends = row[0] <= 1 && row[top] <= 1;
    let nonzero: Vec<usize> = (0..nu).filter(|&l| row[l] != 0).collect();
    let first = row[0] != 1 || nonzero.iter().all(|&l| l == 0);
    let last = row[top] != 1 || nonzero.iter().all(|&l| l == top);
    let middle = !nonzero.iter().any(|&l| l >= 1 && l + 1 < nu) || (row[0] == 0 && row[top] == 0);
    let small = nu > 3 || nonzero.len() <= 1;
    support && ends && first && last && middle && small
}
