use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::potential::PeriodicPotential;

/// `exp(2 pi i m / n)` for `m = 0..n`, built so that entry `n - m` is the
/// exact conjugate of entry `m`.
fn unit_roots(n: usize) -> Vec<Complex64> {
    let mut w = vec![Complex64::new(1.0, 0.0); n];
    for m in 1..n.div_ceil(2) {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / n as f64);
        w[m] = z;
        w[n - m] = z.conj();
    }
    if n.is_multiple_of(2) && n > 0 {
        w[n / 2] = Complex64::new(-1.0, 0.0);
    }
    w
}

/// Samples `V(m/n)`, `m = 0..n`.
pub fn sample_lattice(v: &PeriodicPotential, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(invalid("n", "need at least one quadrature sample"));
    }
    (0..n).map(|m| v.eval(m as f64 / n as f64)).collect()
}

fn coefficient_from_samples(samples: &[Complex64], roots: &[Complex64], q: i64) -> Complex64 {
    let n = samples.len() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, s) in samples.iter().enumerate() {
        let idx = (q * m as i64).rem_euclid(n) as usize;
        acc += s * roots[idx];
    }
    acc / n as f64
}

/// Left-endpoint quadrature `(1/n) sum_m V(m/n) exp(i k m/n)` for the mode
/// `k = 2 pi q`.
pub fn approx_fourier(v: &PeriodicPotential, q: i64, n: usize) -> Result<Complex64> {
    let samples = sample_lattice(v, n)?;
    Ok(coefficient_from_samples(&samples, &unit_roots(n), q))
}

/// Coefficients `V_hat(2 pi q)` for `|q| <= max_q`, either quadrature
/// approximations or exact values.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTruncation {
    /// Number of quadrature samples; `None` for exact coefficients.
    pub n_samples: Option<usize>,
    pub max_q: usize,
    coeffs: Vec<Complex64>,
}

impl FourierTruncation {
    pub fn from_quadrature(v: &PeriodicPotential, max_q: usize, n: usize) -> Result<Self> {
        let samples = sample_lattice(v, n)?;
        let roots = unit_roots(n);
        let m = max_q as i64;
        let coeffs = (-m..=m)
            .map(|q| coefficient_from_samples(&samples, &roots, q))
            .collect();
        Ok(FourierTruncation {
            n_samples: Some(n),
            max_q,
            coeffs,
        })
    }

    /// Exact coefficients; fails for potentials without a closed form.
    pub fn exact(v: &PeriodicPotential, max_q: usize) -> Result<Self> {
        let m = max_q as i64;
        let coeffs = (-m..=m)
            .map(|q| {
                v.exact_fourier(q).ok_or_else(|| {
                    invalid(
                        "potential",
                        "exact Fourier coefficients need a trigonometric polynomial",
                    )
                })
            })
            .collect::<Result<_>>()?;
        Ok(FourierTruncation {
            n_samples: None,
            max_q,
            coeffs,
        })
    }

    /// Coefficient of the mode `k = 2 pi q`; zero outside the stored range.
    pub fn get(&self, q: i64) -> Complex64 {
        if q.unsigned_abs() as usize > self.max_q {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(q + self.max_q as i64) as usize]
    }

    /// `max |V_hat|` over the stored range.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_potential() {
        let v = PeriodicPotential::expression("3 - 2i").unwrap();
        for n in [2, 5, 16] {
            assert!((approx_fourier(&v, 0, n).unwrap() - Complex64::new(3.0, -2.0)).norm() < 1e-14);
            for q in [1, -1, 3] {
                if q % n as i64 != 0 {
                    assert!(approx_fourier(&v, q, n).unwrap().norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn cosine_coefficient_is_half() {
        let v = PeriodicPotential::expression("cos(2*pi*x)").unwrap();
        let c = approx_fourier(&v, -1, 8).unwrap();
        assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn left_riemann_sum_of_x() {
        let v = PeriodicPotential::expression("x").unwrap();
        for n in [3, 10, 100] {
            let c = approx_fourier(&v, 0, n).unwrap();
            let want = (n as f64 - 1.0) / (2.0 * n as f64);
            assert!((c.re - want).abs() < 1e-14);
            assert!((0.5 - c.re - 1.0 / (2.0 * n as f64)).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_needs_closed_form() {
        let v = PeriodicPotential::expression("cos(2*pi*x)").unwrap();
        assert!(FourierTruncation::exact(&v, 3).is_err());
        let t = FourierTruncation::exact(&PeriodicPotential::mathieu(Complex64::new(2.0, 0.0)), 3).unwrap();
        assert_eq!(t.get(1), Complex64::new(1.0, 0.0));
        assert_eq!(t.get(-1), Complex64::new(1.0, 0.0));
        assert_eq!(t.get(0), Complex64::new(0.0, 0.0));
        assert_eq!(t.get(10), Complex64::new(0.0, 0.0));
    }

    proptest! {
        #[test]
        fn real_samples_give_exactly_conjugate_coefficients(
            samples in prop::collection::vec(-10.0f64..10.0, 1..40),
        ) {
            let v = PeriodicPotential::table(samples.iter().map(|&s| Complex64::new(s, 0.0)).collect()).unwrap();
            let n = samples.len() * 3 + 1;
            let t = FourierTruncation::from_quadrature(&v, 6, n).unwrap();
            for q in 0..=6i64 {
                prop_assert_eq!(t.get(-q), t.get(q).conj());
            }
            let mean: Complex64 = sample_lattice(&v, n).unwrap().iter().sum::<Complex64>() / n as f64;
            prop_assert_eq!(t.get(0), mean);
        }
    }
}
