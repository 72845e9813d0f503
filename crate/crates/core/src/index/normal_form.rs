//! Decomposition of a symplectic matrix into basic normal forms, up to
//! matching circle spectrum and nullities.

use nalgebra::{Complex, ComplexField, DMatrix};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{lit, Float};
use crate::symplectic::{spectrum, BasicNormalForm, SymplecticMatrix};

/// Counts of N₁(1,1), N₁(1,−1) and I₂ blocks at the eigenvalue 1 of `a`.
fn unipotent_blocks<T: Float>(a: &DMatrix<T>, alg: usize, geom: usize, tol: &Tolerances) -> Result<(usize, usize, usize)> {
    if alg % 2 != 0 || geom > alg || 2 * geom < alg {
        return Err(Error::UnsupportedNormalForm(format!(
            "eigenvalue ±1 with algebraic multiplicity {alg} and geometric multiplicity {geom}"
        )));
    }
    let d = a.nrows();
    let n = d / 2;
    let nil = a - DMatrix::<T>::identity(d, d);
    let nil2 = &nil * &nil;
    let scale = linalg::max_abs(a).max(T::ONE);
    let cut = lit::<T>(tol.tol_rank).sqrt() * scale * scale;
    let svd = nil2.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let kernel: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cut)
        .collect();
    if kernel.len() != alg {
        return Err(Error::UnsupportedNormalForm(format!(
            "Jordan chains of length > 2 at eigenvalue ±1 (ker N² has dimension {}, multiplicity {alg})",
            kernel.len()
        )));
    }
    let v = DMatrix::<T>::from_fn(d, alg, |r, c| v_t[(kernel[c], r)]);
    let j = linalg::j_matrix::<T>(n);
    let b = v.transpose() * &j * &nil * &v;
    let bs = (&b + b.transpose()) * T::HALF;
    let mut eig: Vec<T> = bs.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|x, y| y.abs().partial_cmp(&x.abs()).unwrap_or(std::cmp::Ordering::Equal));
    let chains = alg - geom;
    let plus = eig.iter().take(chains).filter(|x| **x > T::ZERO).count();
    let minus = chains - plus;
    if chains > 0 && chains < eig.len() {
        let (big, small) = (eig[chains - 1].abs(), eig[chains].abs());
        if !(big > small * lit(100.0)) {
            return Err(Error::UnsupportedNormalForm("Jordan block shear not separated from noise".into()));
        }
    }
    Ok((plus, minus, geom - alg / 2))
}

/// A ⋄-factor list whose realization shares the circle spectrum and every ν_ω
/// with `m`. Eigenvalue 1 first, then rotations by angle, then −1, then
/// hyperbolic factors.
pub fn normal_form_decomposition<T: Float>(m: &SymplecticMatrix<T>, tol: &Tolerances) -> Result<Vec<BasicNormalForm<T>>> {
    let sp = spectrum(m, tol);
    let d = 2 * m.n();
    let j = linalg::j_matrix::<T>(m.n());
    let mut at_one = Vec::new();
    let mut rotations: Vec<(T, BasicNormalForm<T>)> = Vec::new();
    let mut at_minus_one = Vec::new();
    for e in &sp.circle.eigenvalues {
        let theta = e.angle();
        if e.omega.im == T::ZERO && e.omega.re > T::ZERO {
            let (p, q, id) = unipotent_blocks(m.matrix(), e.algebraic, e.geometric, tol)?;
            at_one.extend(std::iter::repeat_n(BasicNormalForm::N1 { lambda: 1, b: 1 }, p));
            at_one.extend(std::iter::repeat_n(BasicNormalForm::N1 { lambda: 1, b: -1 }, q));
            at_one.extend(std::iter::repeat_n(BasicNormalForm::N1 { lambda: 1, b: 0 }, id));
        } else if e.omega.im == T::ZERO {
            let neg = -m.matrix();
            let (p, q, id) = unipotent_blocks(&neg, e.algebraic, e.geometric, tol)?;
            // −N₁(1, b) = N₁(−1, −b)
            at_minus_one.extend(std::iter::repeat_n(BasicNormalForm::N1 { lambda: -1, b: -1 }, p));
            at_minus_one.extend(std::iter::repeat_n(BasicNormalForm::N1 { lambda: -1, b: 1 }, q));
            at_minus_one.extend(std::iter::repeat_n(BasicNormalForm::N1 { lambda: -1, b: 0 }, id));
        } else if theta < T::pi() {
            if e.algebraic != e.geometric {
                return Err(Error::UnsupportedNormalForm(format!(
                    "non-semisimple eigenvalue at angle {:e} (N₂ type)",
                    theta.to_f64_lossy()
                )));
            }
            let mut shifted = linalg::complexify(m.matrix());
            for i in 0..d {
                shifted[(i, i)] -= e.omega;
            }
            let sv = linalg::singular_values_c(&shifted);
            let reference = sv.first().copied().unwrap_or(T::ZERO).max(linalg::max_abs(m.matrix()));
            let kernel = linalg::kernel_c(&shifted, lit::<T>(tol.tol_rank) * reference);
            if kernel.len() != e.geometric {
                return Err(Error::UnsupportedNormalForm("eigenspace dimension unstable".into()));
            }
            let jc = linalg::complexify(&j);
            let g = kernel.len();
            let minus_i = Complex::new(T::ZERO, -T::ONE);
            let krein = DMatrix::<Complex<T>>::from_fn(g, g, |r, c| (kernel[r].adjoint() * &jc * &kernel[c])[(0, 0)] * minus_i);
            let herm = (&krein + krein.adjoint()) * Complex::new(T::HALF, T::ZERO);
            let eig = herm.symmetric_eigenvalues();
            for k in eig.iter() {
                let th = if *k > T::ZERO { theta } else { T::two_pi() - theta };
                rotations.push((th, BasicNormalForm::R { theta: th }));
            }
        }
    }
    rotations.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let (mut pos, mut neg, mut complex) = (0usize, 0usize, 0usize);
    for z in &sp.off_circle {
        if z.im.abs() <= lit::<T>(tol.tol_eig) * z.modulus() {
            if z.re > T::ZERO {
                pos += 1;
            } else {
                neg += 1;
            }
        } else {
            complex += 1;
        }
    }
    if pos % 2 != 0 || neg % 2 != 0 || complex % 4 != 0 {
        return Err(Error::UnsupportedNormalForm("hyperbolic eigenvalues do not pair up".into()));
    }
    let mut out = at_one;
    out.extend(rotations.into_iter().map(|(_, f)| f));
    out.extend(at_minus_one);
    out.extend(std::iter::repeat_n(BasicNormalForm::D { lambda: 2 }, pos / 2 + complex / 2));
    out.extend(std::iter::repeat_n(BasicNormalForm::D { lambda: -2 }, neg / 2));
    let dim: usize = out.iter().map(|f| f.n()).sum();
    if dim != m.n() {
        return Err(Error::UnsupportedNormalForm(format!(
            "decomposition covers dimension {} of {}",
            2 * dim,
            d
        )));
    }
    Ok(out)
}

/// Splitting numbers `(angle, S⁺, S⁻)` of a basic normal form at its circle
/// eigenvalues.
pub fn normal_form_splitting<T: Float>(nf: &BasicNormalForm<T>) -> Vec<(T, i64, i64)> {
    match *nf {
        BasicNormalForm::D { .. } => vec![],
        BasicNormalForm::N1 { lambda: 1, b } => {
            let s = if b >= 0 { 1 } else { 0 };
            vec![(T::ZERO, s, s)]
        }
        BasicNormalForm::N1 { b, .. } => {
            let s = if b <= 0 { 1 } else { 0 };
            vec![(T::pi(), s, s)]
        }
        BasicNormalForm::R { theta } => vec![(theta, 0, 1), (T::two_pi() - theta, 1, 0)],
        BasicNormalForm::N2 { .. } => vec![],
    }
}

/// Mean index from `i₁` and the splitting numbers of a decomposition:
/// `î = i₁ + S⁺(1) − C + Σ_{θ∈(0,2π)} (θ/π) S⁻(e^{iθ})` with
/// `C = Σ_{θ∈(0,2π)} S⁻(e^{iθ})`.
pub fn mean_index_from_normal_forms<T: Float>(i1: i64, nfs: &[BasicNormalForm<T>]) -> T {
    let mut total: T = lit(i1 as f64);
    for nf in nfs {
        for (theta, sp, sm) in normal_form_splitting(nf) {
            if theta == T::ZERO {
                total += lit(sp as f64);
            } else {
                total += lit::<T>(sm as f64) * (theta / T::pi() - T::ONE);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{diamond, diamond_all, realize};

    fn forms(list: &[BasicNormalForm<f64>]) -> SymplecticMatrix<f64> {
        diamond_all(&list.iter().map(|f| realize(f).unwrap()).collect::<Vec<_>>()).unwrap()
    }

    fn random_symplectic(seed: u64, n: usize) -> SymplecticMatrix<f64> {
        let s = DMatrix::from_fn(2 * n, 2 * n, |i, k| (seed as f64 + 1.3 * i as f64 + 0.7 * k as f64).sin() * 0.6);
        SymplecticMatrix::exp_hamiltonian(&s).unwrap()
    }

    fn same_multiset(a: &[BasicNormalForm<f64>], b: &[BasicNormalForm<f64>]) -> bool {
        let key = |f: &BasicNormalForm<f64>| format!("{:?}", match f {
            BasicNormalForm::R { theta } => BasicNormalForm::R { theta: (theta * 1e6).round() / 1e6 },
            other => *other,
        });
        let mut x: Vec<String> = a.iter().map(key).collect();
        let mut y: Vec<String> = b.iter().map(key).collect();
        x.sort();
        y.sort();
        x == y
    }

    #[test]
    fn already_normal() {
        let tol = Tolerances::default();
        let list = [BasicNormalForm::R { theta: 2.0 }, BasicNormalForm::N1 { lambda: 1, b: 1 }];
        let out = normal_form_decomposition(&forms(&list), &tol).unwrap();
        assert!(same_multiset(&out, &list), "{out:?}");
    }

    #[test]
    fn conjugated_forms_recovered() {
        let tol = Tolerances::default();
        let lists: Vec<Vec<BasicNormalForm<f64>>> = vec![
            vec![BasicNormalForm::N1 { lambda: 1, b: 1 }, BasicNormalForm::R { theta: 2.2 }],
            vec![BasicNormalForm::N1 { lambda: 1, b: -1 }, BasicNormalForm::R { theta: 4.4 }],
            vec![BasicNormalForm::N1 { lambda: -1, b: 1 }, BasicNormalForm::D { lambda: -2 }],
            vec![BasicNormalForm::N1 { lambda: -1, b: -1 }, BasicNormalForm::N1 { lambda: 1, b: 0 }],
            vec![BasicNormalForm::N1 { lambda: 1, b: 1 }, BasicNormalForm::N1 { lambda: 1, b: -1 }, BasicNormalForm::N1 { lambda: 1, b: -1 }],
        ];
        for (s, list) in lists.iter().enumerate() {
            let p = random_symplectic(s as u64, list.iter().map(|f| f.n()).sum());
            let m = forms(list).conjugate_by(&p);
            let out = normal_form_decomposition(&m, &tol).unwrap();
            assert!(same_multiset(&out, list), "{list:?} -> {out:?}");
        }
    }

    #[test]
    fn rotation_angle_recovered_to_1e8() {
        let tol = Tolerances::default();
        let theta = 5.123456789;
        let m = diamond(&realize(&BasicNormalForm::N1 { lambda: 1, b: 1 }).unwrap(), &realize(&BasicNormalForm::R { theta }).unwrap());
        let out = normal_form_decomposition(&m.conjugate_by(&random_symplectic(7, 2)), &tol).unwrap();
        let got = out.iter().find_map(|f| match f {
            BasicNormalForm::R { theta } => Some(*theta),
            _ => None,
        });
        assert!((got.unwrap() - theta).abs() < 1e-8);
    }

    #[test]
    fn mean_index_of_rotation() {
        // R(tθ) on [0,1] with θ ∈ (0, 2π): i₁ = 1, î = θ/π
        let theta = 2.5;
        let m = mean_index_from_normal_forms(1, &[BasicNormalForm::R { theta }]);
        assert!((m - theta / std::f64::consts::PI).abs() < 1e-15);
    }
}
