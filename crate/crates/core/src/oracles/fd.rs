//! Second-order finite differences on a truncated interval with Dirichlet
//! ends. Used to show eigenvalues appearing inside spectral gaps.

use crate::error::{invalid, Result, SpectraError};
use crate::potential::PeriodicPotential;

pub const DEFAULT_MAX_DIM: usize = 20_000;
const TOLERANCE: f64 = 1e-8;

/// Real symmetric tridiagonal matrix stored by diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = a - x - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (a.abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing every eigenvalue.
    pub fn bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, &a) in self.diag.iter().enumerate() {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + self.off.get(i).map_or(0.0, |b| b.abs());
            lo = lo.min(a - r);
            hi = hi.max(a + r);
        }
        (lo, hi)
    }

    /// All eigenvalues, ascending, each to absolute tolerance `tol`.
    pub fn eigenvalues(&self, tol: f64) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        (0..self.dim())
            .map(|k| {
                // Smallest x with count_below(x) > k.
                let (mut a, mut b) = (lo - tol, hi + tol);
                while b - a > tol {
                    let m = 0.5 * (a + b);
                    if self.count_below(m) > k {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                0.5 * (a + b)
            })
            .collect()
    }
}

/// Matrix `(-u_{j-1} + 2u_j - u_{j+1})/h^2 + V(x_j) u_j` on the nodes
/// `x_j = -L + j h` strictly inside `(-L, L)`.
pub fn fd_matrix(v: &PeriodicPotential, half_width: f64, h: f64, max_dim: usize) -> Result<Tridiagonal> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid("h", format!("must be positive, got {h}")));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(invalid("half_width", format!("must be positive, got {half_width}")));
    }
    let ratio = 2.0 * half_width / h;
    let dim = (ratio - 1e-9).ceil() as usize - 1;
    if dim > max_dim {
        return Err(SpectraError::MatrixTooLarge { dim, budget: max_dim });
    }
    if dim == 0 {
        return Err(invalid("h", "no interior nodes"));
    }
    let inv_h2 = 1.0 / (h * h);
    let mut diag = Vec::with_capacity(dim);
    for j in 1..=dim {
        let x = -half_width + j as f64 * h;
        let value = v.eval(x)?;
        if value.im.abs() > 1e-12 * (1.0 + value.re.abs()) {
            return Err(invalid(
                "potential",
                "finite-difference truncation needs a real potential",
            ));
        }
        diag.push(2.0 * inv_h2 + value.re);
    }
    Ok(Tridiagonal {
        diag,
        off: vec![-inv_h2; dim - 1],
    })
}

pub fn truncated_fd_spectrum(v: &PeriodicPotential, half_width: f64, h: f64) -> Result<Vec<f64>> {
    truncated_fd_spectrum_with(v, half_width, h, DEFAULT_MAX_DIM)
}

pub fn truncated_fd_spectrum_with(v: &PeriodicPotential, half_width: f64, h: f64, max_dim: usize) -> Result<Vec<f64>> {
    Ok(fd_matrix(v, half_width, h, max_dim)?.eigenvalues(TOLERANCE))
}
