//! Dense complex linear algebra used by the scans.
//!
//! Determinants go through an in-place LU factorization with partial
//! pivoting so the hot loops never allocate. Eigenvalues and singular values
//! are delegated to `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SpectraError};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Determinant of the row-major `n x n` matrix stored in `buf`, which is
/// overwritten by its LU factors.
pub fn det_in_place(buf: &mut [Complex64], n: usize) -> Complex64 {
    debug_assert_eq!(buf.len(), n * n);
    let mut det = ONE;
    for col in 0..n {
        let mut pivot = col;
        let mut best = buf[col * n + col].norm_sqr();
        for row in col + 1..n {
            let v = buf[row * n + col].norm_sqr();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return ZERO;
        }
        if pivot != col {
            for k in 0..n {
                buf.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let diag = buf[col * n + col];
        det *= diag;
        let inv = diag.inv();
        for row in col + 1..n {
            let factor = buf[row * n + col] * inv;
            if factor == ZERO {
                continue;
            }
            for k in col + 1..n {
                let upper = buf[col * n + k];
                buf[row * n + k] -= factor * upper;
            }
        }
    }
    det
}

/// Determinant by LU with partial pivoting.
pub fn lu_det(m: &CMatrix) -> Complex64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.nrows();
    let mut buf: Vec<Complex64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            buf.push(m[(i, j)]);
        }
    }
    det_in_place(&mut buf, n)
}

/// `det(I - m)`.
pub fn det_identity_minus(m: &CMatrix) -> Complex64 {
    let n = m.nrows();
    let mut buf = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { ONE } else { ZERO };
            buf.push(delta - m[(i, j)]);
        }
    }
    det_in_place(&mut buf, n)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// All eigenvalues via a complex Schur decomposition.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur =
        nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(SpectraError::EigenFailure(n))?;
    schur
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or(SpectraError::EigenFailure(n))
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Schatten `s`-norm `(sum sigma_i^s)^(1/s)`; `s = 2` is the Frobenius norm.
pub fn schatten_norm(m: &CMatrix, s: f64) -> f64 {
    assert!(s >= 1.0, "Schatten exponent must be >= 1");
    if s == 2.0 {
        return m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    }
    if s.is_infinite() {
        return singular_values(m).into_iter().fold(0.0, f64::max);
    }
    singular_values(m)
        .into_iter()
        .map(|sv| sv.powf(s))
        .sum::<f64>()
        .powf(1.0 / s)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn det_of_diagonal_and_permutation() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(2.0, 0.0),
            c(0.0, 3.0),
            c(-1.0, 0.0),
        ]));
        assert!((lu_det(&d) - c(0.0, -6.0)).norm() < 1e-14);

        let p = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!((lu_det(&p) + ONE).norm() < 1e-15);
    }

    #[test]
    fn det_matches_cofactor_expansion_3x3() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 2.0),
                c(0.5, 0.0),
                c(-1.0, 1.0),
                c(0.0, 1.0),
                c(3.0, 0.0),
                c(2.0, -2.0),
                c(4.0, 0.0),
                c(1.0, 1.0),
                c(0.0, 0.0),
            ],
        );
        let cof = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
        assert!((lu_det(&m) - cof).norm() < 1e-12);
        assert!((lu_det(&m) - m.clone().determinant()).norm() < 1e-12);
    }

    #[test]
    fn singular_matrix_has_zero_det() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        assert_eq!(lu_det(&m), ZERO);
    }

    #[test]
    fn eigenvalues_of_rotation() {
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, -ONE, ONE, ZERO]);
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn schatten_norms_of_diagonal() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(0.0, 4.0)]));
        assert!((schatten_norm(&d, 2.0) - 5.0).abs() < 1e-12);
        assert!((schatten_norm(&d, 1.0) - 7.0).abs() < 1e-12);
        assert!((schatten_norm(&d, 3.0) - (27.0f64 + 64.0).powf(1.0 / 3.0)).abs() < 1e-12);
        assert!((schatten_norm(&d, f64::INFINITY) - 4.0).abs() < 1e-12);
    }
}
