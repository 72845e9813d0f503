//! Dense matrix helpers: J, matrix exponential/logarithm, symplectic projection.

use nalgebra::{Complex, DMatrix};

use crate::scalar::{lit, Float};

pub type CMatrix<T> = DMatrix<Complex<T>>;

/// The standard structure `J = [[0, -I], [I, 0]]` on ℝ²ⁿ.
pub fn j_matrix<T: Float>(n: usize) -> DMatrix<T> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = -T::ONE;
        j[(n + k, k)] = T::ONE;
    }
    j
}

/// Apply J to a vector without forming the matrix.
pub fn apply_j<T: Float>(v: &nalgebra::DVector<T>) -> nalgebra::DVector<T> {
    let n = v.len() / 2;
    nalgebra::DVector::from_fn(2 * n, |i, _| if i < n { -v[n + i] } else { v[i - n] })
}

/// Largest absolute entry.
pub fn max_abs<T: Float>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::ZERO, |acc, x| acc.max(x.abs()))
}

fn norm1<T: Float>(m: &DMatrix<T>) -> T {
    (0..m.ncols())
        .map(|c| m.column(c).iter().fold(T::ZERO, |s, x| s + x.abs()))
        .fold(T::ZERO, |a, b| a.max(b))
}

pub fn complexify<T: Float>(m: &DMatrix<T>) -> CMatrix<T> {
    m.map(|x| Complex::new(x, T::ZERO))
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm<T: Float>(a: &DMatrix<T>) -> DMatrix<T> {
    let dim = a.nrows();
    let nrm = norm1(a);
    let mut s = 0u32;
    let half = T::HALF;
    let mut scale = T::ONE;
    while nrm * scale > half {
        scale *= half;
        s += 1;
    }
    let b = a * scale;
    let mut result = DMatrix::<T>::identity(dim, dim);
    let mut term = DMatrix::<T>::identity(dim, dim);
    for k in 1..=30 {
        term = &term * &b / T::nat(k);
        result += &term;
        if max_abs(&term) <= T::EPS * max_abs(&result) {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Principal square root via the Denman–Beavers iteration.
pub fn sqrtm<T: Float>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    let dim = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<T>::identity(dim, dim);
    for _ in 0..100 {
        let yi = y.clone().try_inverse()?;
        let zi = z.clone().try_inverse()?;
        let y_next = (&y + &zi) * T::HALF;
        let z_next = (&z + &yi) * T::HALF;
        let change = max_abs(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if change <= lit::<T>(64.0) * T::EPS * max_abs(&y).max(T::ONE) {
            return Some(y);
        }
    }
    None
}

/// Principal logarithm by inverse scaling and squaring. Fails when a real
/// negative eigenvalue blocks the principal branch.
pub fn logm<T: Float>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    let dim = a.nrows();
    let id = DMatrix::<T>::identity(dim, dim);
    let mut x = a.clone();
    let mut k = 0;
    while norm1(&(&x - &id)) > lit(0.25) {
        x = sqrtm(&x)?;
        k += 1;
        if k > 60 {
            return None;
        }
    }
    let e = &x - &id;
    let mut power = e.clone();
    let mut log = e.clone();
    for j in 2..=80 {
        power = &power * &e;
        let term = &power / T::nat(j);
        if j % 2 == 0 {
            log -= &term;
        } else {
            log += &term;
        }
        if max_abs(&term) <= T::EPS * max_abs(&log).max(T::EPS) {
            break;
        }
    }
    let mut scale = T::ONE;
    for _ in 0..k {
        scale *= T::TWO;
    }
    let log = log * scale;
    // the square-root iteration can settle on a non-real branch near a
    // defective negative eigenvalue
    let back = expm(&log);
    if max_abs(&(&back - a)) > T::EPS.sqrt().sqrt() * max_abs(a).max(T::ONE) {
        return None;
    }
    Some(log)
}

/// Symplectic defect `‖MᵀJM − J‖` measured by the largest entry.
pub fn symplectic_defect<T: Float>(m: &DMatrix<T>) -> T {
    let n = m.nrows() / 2;
    let j = j_matrix::<T>(n);
    max_abs(&(m.transpose() * &j * m - j))
}

/// Project a nearly symplectic matrix onto Sp(2n) by the symplectic polar
/// factor `M (M^♯ M)^{-1/2}`, with `M^♯ = -J Mᵀ J`.
pub fn symplectic_project<T: Float>(m: &DMatrix<T>) -> DMatrix<T> {
    let n = m.nrows() / 2;
    let j = j_matrix::<T>(n);
    let id = DMatrix::<T>::identity(2 * n, 2 * n);
    let three = lit::<T>(3.0);
    let mut out = m.clone();
    for _ in 0..8 {
        let q = -(&j * out.transpose() * &j * &out);
        let defect = max_abs(&(&q - &id));
        if defect <= lit::<T>(4.0) * T::EPS {
            break;
        }
        out = &out * ((&id * three - q) * T::HALF);
    }
    out
}

/// Singular values of a complex matrix, sorted descending.
pub fn singular_values_c<T: Float>(m: &CMatrix<T>) -> Vec<T> {
    let mut sv: Vec<T> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Eigenvalues of a complex matrix through its Schur form.
pub fn eigenvalues_c<T: Float>(m: &CMatrix<T>) -> Vec<Complex<T>> {
    let schur = nalgebra::linalg::Schur::new(m.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Eigenvalues of a real matrix.
pub fn eigenvalues<T: Float>(m: &DMatrix<T>) -> Vec<Complex<T>> {
    m.complex_eigenvalues().iter().copied().collect()
}

/// Null space of a square complex matrix: right singular vectors whose
/// singular value is at most `threshold`.
pub fn kernel_c<T: Float>(m: &CMatrix<T>, threshold: T) -> Vec<nalgebra::DVector<Complex<T>>> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= threshold {
            out.push(v_t.row(i).adjoint());
        }
    }
    out
}
