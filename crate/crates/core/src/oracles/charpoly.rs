//! Eigenvalues through the characteristic polynomial.
//!
//! Independent of the Schur-based eigensolver used by the scans: the
//! coefficients come from the Faddeev-LeVerrier recursion on a norm-scaled
//! copy of the matrix, the roots from Durand-Kerner sweeps, and a few
//! Aberth-style corrections with the exact log-derivative `tr((z - M)^-1)`
//! undo the conditioning loss of the coefficient route.

use num_complex::Complex64;

use crate::error::{invalid, Result, SpectraError};
use crate::linalg::{self, CMatrix, ONE, ZERO};

pub const MAX_DIM: usize = 64;
pub const MAX_SWEEPS: usize = 500;
pub const TOLERANCE: f64 = 1e-12;
const POLISH_ROUNDS: usize = 100;

/// Coefficients `c_0..=c_n` of `det(zI - m) = sum c_k z^k` (`c_n = 1`).
pub fn characteristic_coefficients(m: &CMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    let mut c = vec![ZERO; n + 1];
    c[n] = ONE;
    let mut mk = CMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = m * &mk;
        for i in 0..n {
            next[(i, i)] += c[n + 1 - k];
        }
        mk = next;
        c[n - k] = -linalg::trace(&(m * &mk)) / k as f64;
    }
    c
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let mut v = ZERO;
    let mut scale = 0.0;
    let r = z.norm();
    for coef in c.iter().rev() {
        v = v * z + coef;
        scale = scale * r + coef.norm();
    }
    (v, scale)
}

fn durand_kerner(c: &[Complex64]) -> (Vec<Complex64>, f64, usize) {
    let n = c.len() - 1;
    let bound = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| seed.powu(k as u32) * (bound / 2.0).clamp(0.5, 1.0))
        .collect();
    let residual = |z: &[Complex64]| {
        z.iter()
            .map(|&zi| {
                let (v, s) = horner(c, zi);
                v.norm() / s.max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    };
    let mut best = residual(&z);
    for sweep in 1..=MAX_SWEEPS {
        for i in 0..n {
            let (v, _) = horner(c, z[i]);
            let mut den = ONE;
            for j in 0..n {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            if den != ZERO {
                z[i] -= v / den;
            }
        }
        best = residual(&z);
        if best <= TOLERANCE {
            return (z, best, sweep);
        }
    }
    (z, best, MAX_SWEEPS)
}

/// Relative determinant residual `|det(m - z)| / (|m|_F + |z|)^n`.
pub fn relative_residual(m: &CMatrix, z: Complex64) -> f64 {
    let n = m.nrows();
    let shifted = m - CMatrix::identity(n, n) * z;
    let scale = (m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() + z.norm()).max(f64::MIN_POSITIVE);
    linalg::lu_det(&shifted).norm() / scale.powi(n as i32)
}

/// `tr((z - m)^-1)`, the log-derivative of the characteristic polynomial.
fn log_derivative(m: &CMatrix, z: Complex64) -> Option<Complex64> {
    let n = m.nrows();
    let shifted = CMatrix::identity(n, n) * z - m;
    shifted.try_inverse().map(|inv| linalg::trace(&inv))
}

fn polish(m: &CMatrix, roots: &mut [Complex64]) {
    for _ in 0..POLISH_ROUNDS {
        let mut moved = false;
        for i in 0..roots.len() {
            let zi = roots[i];
            let Some(ld) = log_derivative(m, zi) else { continue };
            let others: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, zj)| j != i && *zj != zi)
                .map(|(_, zj)| (zi - zj).inv())
                .sum();
            let den = ld - others;
            if den == ZERO || !den.re.is_finite() {
                continue;
            }
            let step = den.inv();
            let candidate = zi - step;
            // The matrix is scaled to unit Frobenius norm, so every root lies in the unit disk.
            if candidate.re.is_finite() && candidate.im.is_finite() && step.norm() <= 0.5 {
                if (candidate - zi).norm() > 1e-15 * (1.0 + zi.norm()) {
                    moved = true;
                }
                roots[i] = candidate;
            }
        }
        if !moved {
            break;
        }
    }
}

/// All eigenvalues of `m` with multiplicity.
pub fn char_poly_roots(m: &CMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(invalid("matrix", "must be square"));
    }
    let n = m.nrows();
    if n > MAX_DIM {
        return Err(invalid(
            "matrix",
            format!("dimension {n} exceeds the oracle limit {MAX_DIM}"),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(vec![ZERO; n]);
    }
    let scaled = m / Complex64::new(scale, 0.0);
    let coeffs = characteristic_coefficients(&scaled);
    let (mut roots, residual, _) = durand_kerner(&coeffs);
    if residual > TOLERANCE {
        return Err(SpectraError::RootsNotConverged {
            sweeps: MAX_SWEEPS,
            residual,
        });
    }
    polish(&scaled, &mut roots);
    Ok(roots.into_iter().map(|z| z * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn diagonal_roots() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(2.0, 0.0),
            c(3.0, 0.0),
        ]));
        let r = sorted(char_poly_roots(&d).unwrap());
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn companion_of_z2_plus_1() {
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, c(-1.0, 0.0), ONE, ZERO]);
        let mut r = char_poly_roots(&m).unwrap();
        r.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn coefficients_of_known_matrix() {
        // det(z - [[1,2],[3,4]]) = z^2 - 5z - 2
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let k = characteristic_coefficients(&m);
        assert!((k[0] - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((k[1] - c(-5.0, 0.0)).norm() < 1e-14);
        assert_eq!(k[2], ONE);
    }

    #[test]
    fn repeated_and_zero_roots() {
        let z = CMatrix::zeros(3, 3);
        assert_eq!(char_poly_roots(&z).unwrap(), vec![ZERO; 3]);
        let jordan = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), ONE, ZERO, c(2.0, 0.0)]);
        for r in char_poly_roots(&jordan).unwrap() {
            assert!((r - c(2.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn rejects_oversized_input() {
        let m = CMatrix::zeros(MAX_DIM + 1, MAX_DIM + 1);
        assert!(char_poly_roots(&m).is_err());
    }

    #[test]
    fn agrees_with_schur_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for n in [3, 6, 10] {
            let m = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let ours = char_poly_roots(&m).unwrap();
            let schur = linalg::eigenvalues(&m).unwrap();
            for z in &schur {
                let nearest = ours.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-9, "n = {n}: {z} missing");
            }
            for z in &ours {
                assert!(relative_residual(&m, *z) < 1e-12);
            }
        }
    }
}
