//! Explicit paths from I to basic normal forms, for fixtures and audits.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::index::path::SymplecticPath;
use crate::linalg;
use crate::scalar::{lit, Float};
use crate::symplectic::{diamond_all, BasicNormalForm, SymplecticMatrix};

fn rot<T: Float>(a: T) -> DMatrix<T> {
    let (s, c) = a.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

fn shear<T: Float>(b: T) -> DMatrix<T> {
    DMatrix::from_row_slice(2, 2, &[T::ONE, b, T::ZERO, T::ONE])
}

/// A path `[0,1] → Sp(2)` (or Sp(4) for N₂) ending at `nf` which winds
/// `winding` extra half or full turns on the way.
pub fn normal_form_path<T: Float>(nf: &BasicNormalForm<T>, winding: usize, samples: usize) -> Result<SymplecticPath<T>> {
    let end = crate::symplectic::realize(nf)?;
    let two_pi = T::two_pi();
    let k = T::nat(winding);
    let path = match *nf {
        BasicNormalForm::R { theta } => SymplecticPath::from_fn(T::ONE, samples, |t| {
            SymplecticMatrix::new_unchecked(rot(t * (theta + two_pi * k)))
        }),
        BasicNormalForm::D { lambda } => {
            let turns = if lambda > 0 { two_pi * k } else { T::pi() * (T::TWO * k + T::ONE) };
            SymplecticPath::from_fn(T::ONE, samples, |t| {
                let s = lit::<T>(2.0).powf(t);
                let d = DMatrix::from_row_slice(2, 2, &[s, T::ZERO, T::ZERO, T::ONE / s]);
                SymplecticMatrix::new_unchecked(rot(t * turns) * d)
            })
        }
        BasicNormalForm::N1 { lambda, b } => {
            let b = lit::<T>(b as f64);
            let (turns, sb) = if lambda > 0 {
                (two_pi * k, b)
            } else {
                (T::pi() * (T::TWO * k + T::ONE), -b)
            };
            SymplecticPath::from_fn(T::ONE, samples, |t| {
                SymplecticMatrix::new_unchecked(rot(t * turns) * shear(sb * t))
            })
        }
        BasicNormalForm::N2 { .. } => {
            let log = linalg::logm(end.matrix()).expect("N₂ has no negative real eigenvalues");
            let n = 2;
            let wind = linalg::j_matrix::<T>(n) * (two_pi * k);
            SymplecticPath::from_fn(T::ONE, samples, |t| {
                SymplecticMatrix::new_unchecked(linalg::expm(&(&wind * t)) * linalg::expm(&(&log * t)))
            })
        }
    };
    let _ = end;
    Ok(path)
}

/// ⋄-product of factor paths, optionally conjugated by `p`.
pub fn composite_path<T: Float>(
    factors: &[(BasicNormalForm<T>, usize)],
    samples: usize,
    p: Option<&SymplecticMatrix<T>>,
) -> Result<SymplecticPath<T>> {
    let paths = factors
        .iter()
        .map(|(f, w)| normal_form_path(f, *w, samples))
        .collect::<Result<Vec<_>>>()?;
    let times = paths[0].times().to_vec();
    let mats = (0..times.len())
        .map(|i| diamond_all(&paths.iter().map(|q| q.matrices()[i].clone()).collect::<Vec<_>>()).unwrap())
        .collect();
    let path = SymplecticPath::new_unchecked(times, mats);
    Ok(match p {
        Some(p) => path.conjugate_by(p),
        None => path,
    })
}
