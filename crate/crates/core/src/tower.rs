//! Height-two tower for potentials with one singular point: the inner limit
//! smooths `V` by a periodic cutoff, the outer limit is the Schrodinger scan.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cloud::SpectralCloud;
use crate::error::{invalid, Result, SpectraError};
use crate::potential::PeriodicPotential;
use crate::schrodinger::{main_gamma, SchrodingerAlgoParams};

/// Periodic piecewise linear cutoff: 0 within `1/n` of `center + Z`,
/// 1 beyond `2/n`, linear in between (Lipschitz constant `n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub n: usize,
    pub center: f64,
}

impl CutoffProfile {
    pub fn new(n: usize, center: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "cutoff index must be positive"));
        }
        if !center.is_finite() {
            return Err(invalid("center", "must be finite"));
        }
        Ok(CutoffProfile {
            n,
            center: center.rem_euclid(1.0),
        })
    }

    /// Distance from `x` to `center + Z`.
    pub fn distance(&self, x: f64) -> f64 {
        let t = (x - self.center).rem_euclid(1.0);
        t.min(1.0 - t)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.n as f64 * self.distance(x) - 1.0).clamp(0.0, 1.0)
    }

    /// Whether `x` lies in the open zero plateau.
    pub fn in_plateau(&self, x: f64) -> bool {
        self.distance(x) < 1.0 / self.n as f64
    }
}

/// `rho_n V` with the plateau centered on the singular point of `V`
/// (or on the integers when `V` has none).
pub fn cutoff_multiply(v: &PeriodicPotential, n: usize) -> Result<PeriodicPotential> {
    cutoff_multiply_at(v, n, v.singular_point().unwrap_or(0.0))
}

/// `rho_n V` with an explicit plateau center; the singular point of `V`
/// must fall inside the plateau.
pub fn cutoff_multiply_at(v: &PeriodicPotential, n: usize, center: f64) -> Result<PeriodicPotential> {
    let profile = CutoffProfile::new(n, center)?;
    if let Some(x0) = v.singular_point() {
        if !profile.in_plateau(x0) {
            return Err(SpectraError::SingularOutsidePlateau {
                x0,
                center: profile.center,
                n,
            });
        }
    }
    Ok(PeriodicPotential::cutoff(Arc::new(v.clone()), profile))
}

/// Scan of `rho_n V` at plane-wave half-width `m`.
pub fn tower_gamma(v: &PeriodicPotential, m: usize, n: usize, params: &SchrodingerAlgoParams) -> Result<SpectralCloud> {
    let smoothed = cutoff_multiply(v, n)?;
    let inner = SchrodingerAlgoParams {
        half_width: m,
        ..params.clone()
    };
    let mut cloud = main_gamma(&smoothed, &inner)?;
    cloud.metadata.insert("tower_m".into(), m.to_string());
    cloud.metadata.insert("tower_n".into(), n.to_string());
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn profile_invariants_on_probe_grid() {
        for n in [4, 7, 16, 64] {
            let p = CutoffProfile::new(n, 0.0).unwrap();
            let probes = 10 * n;
            let mut prev: Option<(f64, f64)> = None;
            for i in 0..=probes {
                let x = -1.0 + 2.0 * i as f64 / probes as f64;
                let r = p.eval(x);
                assert!((0.0..=1.0).contains(&r));
                let d = p.distance(x);
                if d < 1.0 / n as f64 {
                    assert_eq!(r, 0.0);
                }
                if d >= 2.0 / n as f64 {
                    assert_eq!(r, 1.0);
                }
                assert_eq!(r, p.eval(x + 1.0));
                if let Some((px, pr)) = prev {
                    assert!((r - pr).abs() <= n as f64 * (x - px) * (1.0 + 1e-12));
                }
                prev = Some((x, r));
            }
        }
    }

    #[test]
    fn cosine_product_matches_definition() {
        let v = PeriodicPotential::expression("cos(2*pi*x)").unwrap();
        let w = cutoff_multiply(&v, 4).unwrap();
        for i in 0..200 {
            let x = i as f64 / 200.0;
            let t = x.min(1.0 - x);
            let got = w.eval(x).unwrap();
            if t < 0.25 {
                assert_eq!(got, Complex64::new(0.0, 0.0));
            }
            assert!(w.exact_fourier(1).is_none());
        }
        let z = cutoff_multiply(&PeriodicPotential::zero(), 9).unwrap();
        assert_eq!(z.eval(0.4).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn singular_point_must_be_covered() {
        let v = PeriodicPotential::singular("log(abs(x - 0.25))", 0.25).unwrap();
        assert!(cutoff_multiply(&v, 8).is_ok());
        assert!(cutoff_multiply_at(&v, 8, 0.0).is_err());
        let w = cutoff_multiply(&v, 8).unwrap();
        for i in 0..1000 {
            assert!(w.eval(i as f64 / 1000.0).is_ok());
        }
    }

    #[test]
    fn l2_error_of_log_potential_decreases() {
        let v = PeriodicPotential::singular("log(abs(x - 0.25))", 0.25).unwrap();
        let samples = 1 << 16;
        let err = |n: usize| {
            let w = cutoff_multiply(&v, n).unwrap();
            let s: f64 = (0..samples)
                .map(|i| {
                    let x = (i as f64 + 0.5) / samples as f64;
                    (w.eval(x).unwrap() - v.eval(x).unwrap()).norm_sqr()
                })
                .sum();
            (s / samples as f64).sqrt()
        };
        let trace: Vec<f64> = [8, 16, 32, 64, 128].iter().map(|&n| err(n)).collect();
        assert!(trace.windows(2).all(|w| w[1] < w[0]), "{trace:?}");
        assert!(trace[4] < 0.5 * trace[0]);
    }
}
