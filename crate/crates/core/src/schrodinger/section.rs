//! Finite Birman-Schwinger sections and their determinants.
//!
//! With `G(theta) = diag((k_j + theta)^2) + V` the plane-wave Galerkin
//! matrix, the section satisfies
//! `det(I - M(z)) = det(z - G) / prod_j (z - shift - k_j^2)`,
//! so zeros in `z` are exactly the Galerkin eigenvalues.

use num_complex::Complex64;

use crate::error::{invalid, Result, SpectraError};
use crate::linalg::{self, CMatrix, ONE, ZERO};

use super::fourier::FourierTruncation;
use super::modes::ModeIndexing;

/// Relative size below which a resolvent divisor counts as zero.
const COLLISION_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct BirmanSchwingerSection {
    pub shift: Complex64,
    pub z: Complex64,
    pub theta: f64,
    pub half_width: usize,
    pub matrix: CMatrix,
}

fn check_coverage(f: &FourierTruncation, half_width: usize) -> Result<()> {
    if f.max_q < 2 * half_width {
        return Err(invalid(
            "fourier",
            format!("coefficients up to |q| = {} needed, have {}", 2 * half_width, f.max_q),
        ));
    }
    Ok(())
}

/// Index of a mode whose free-resolvent divisor `z - shift - k^2` vanishes.
pub fn colliding_mode(modes: &ModeIndexing, z: Complex64, shift: Complex64) -> Option<i64> {
    modes.ks().zip(&modes.q).find_map(|(k, &q)| {
        let d = z - shift - k * k;
        (d.norm() <= COLLISION_TOL * (1.0 + z.norm() + k * k)).then_some(q)
    })
}

/// `(shift + k_j^2)^(1/2)` per mode.
pub fn half_powers(modes: &ModeIndexing, shift: Complex64) -> Result<Vec<Complex64>> {
    modes
        .ks()
        .map(|k| {
            let v = shift + k * k;
            if v == ZERO {
                Err(SpectraError::SingularShift(shift))
            } else {
                Ok(v.sqrt())
            }
        })
        .collect()
}

/// Section with entries
/// `[diag(2 theta k_j + theta^2 - shift) + h_j^-1 V_hat(k_m - k_j) h_m] / (z - shift - k_m^2)`.
pub fn build_bs_section(
    f: &FourierTruncation,
    z: Complex64,
    theta: f64,
    half_width: usize,
    shift: Complex64,
) -> Result<BirmanSchwingerSection> {
    check_coverage(f, half_width)?;
    let modes = ModeIndexing::new(half_width);
    if let Some(mode) = colliding_mode(&modes, z, shift) {
        return Err(SpectraError::FreeSpectrumCollision { z, shift, mode });
    }
    let h = half_powers(&modes, shift)?;
    let dim = modes.len();
    let resolvent: Vec<Complex64> = modes.ks().map(|k| (z - shift - k * k).inv()).collect();
    let matrix = CMatrix::from_fn(dim, dim, |j, m| {
        let mut v = f.get(modes.q[m] - modes.q[j]) * h[m] / h[j];
        if j == m {
            let k = modes.k(j);
            v += 2.0 * theta * k + theta * theta - shift;
        }
        v * resolvent[m]
    });
    Ok(BirmanSchwingerSection {
        shift,
        z,
        theta,
        half_width,
        matrix,
    })
}

/// `diag((k_j + theta)^2) + [V_hat(k_m - k_j)]`.
pub fn galerkin_matrix(f: &FourierTruncation, theta: f64, half_width: usize) -> Result<CMatrix> {
    check_coverage(f, half_width)?;
    let modes = ModeIndexing::new(half_width);
    let dim = modes.len();
    Ok(CMatrix::from_fn(dim, dim, |j, m| {
        let mut v = f.get(modes.q[m] - modes.q[j]);
        if j == m {
            let kt = modes.k(j) + theta;
            v += kt * kt;
        }
        v
    }))
}

impl BirmanSchwingerSection {
    /// `det(I - M)`.
    pub fn det(&self) -> Complex64 {
        linalg::det_identity_minus(&self.matrix)
    }

    pub fn reg_det(&self, m: usize) -> Result<Complex64> {
        reg_det(m, &self.matrix)
    }
}

/// `det_m(I - M) = det(I - M) exp(sum_{j<m} tr(M^j)/j)`.
pub fn reg_det(m: usize, matrix: &CMatrix) -> Result<Complex64> {
    if m == 0 {
        return Err(invalid("m", "order must be at least 1"));
    }
    let plain = linalg::det_identity_minus(matrix);
    if m == 1 {
        return Ok(plain);
    }
    let mut power = matrix.clone();
    let mut exponent = ZERO;
    for j in 1..m {
        if j > 1 {
            power = &power * matrix;
        }
        exponent += linalg::trace(&power) / j as f64;
    }
    Ok(plain * exponent.exp())
}

/// Same value through eigenvalues: `prod_i (1 - l_i) exp(sum_{j<m} l_i^j / j)`.
pub fn reg_det_from_eigenvalues(m: usize, eigenvalues: &[Complex64]) -> Complex64 {
    eigenvalues
        .iter()
        .map(|&l| {
            let series: Complex64 = (1..m).map(|j| l.powu(j as u32) / j as f64).sum();
            (ONE - l) * series.exp()
        })
        .product()
}
