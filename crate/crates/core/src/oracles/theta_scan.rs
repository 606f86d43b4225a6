use num_complex::Complex64;

use crate::cloud::SpectralCloud;
use crate::error::{invalid, Result};
use crate::periodic_matrix::{bloch_symbol_unchecked, BandedPeriodicOperator};

use super::charpoly::char_poly_roots;

/// Union of the Bloch-symbol eigenvalues over `theta = 2 pi i / samples`,
/// `i = 0..samples`.
pub fn theta_scan_spectrum(a: &BandedPeriodicOperator, samples: usize) -> Result<SpectralCloud> {
    if samples < 2 {
        return Err(invalid("samples", "need at least 2 quasi-momenta"));
    }
    let step = 2.0 * std::f64::consts::PI / samples as f64;
    let mut points: Vec<Complex64> = Vec::with_capacity(samples * a.period());
    for i in 0..samples {
        let symbol = bloch_symbol_unchecked(a, step * i as f64);
        points.extend(char_poly_roots(&symbol)?);
    }
    let mut cloud = SpectralCloud::new(points, step);
    cloud.metadata.insert("algorithm".into(), "theta_scan".into());
    cloud.metadata.insert("samples".into(), samples.to_string());
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::oracles::charpoly::relative_residual;
    use crate::periodic_matrix::bloch_symbol;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shift_lands_on_unit_circle() {
        let a = BandedPeriodicOperator::laurent(vec![ZERO, ZERO, c(1.0, 0.0)]).unwrap();
        let cloud = theta_scan_spectrum(&a, 360).unwrap();
        assert_eq!(cloud.len(), 360);
        assert!(cloud.points.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn symmetric_laurent_lands_on_interval() {
        let a = BandedPeriodicOperator::laurent(vec![c(1.0, 0.0), ZERO, c(1.0, 0.0)]).unwrap();
        let cloud = theta_scan_spectrum(&a, 100).unwrap();
        assert!(cloud
            .points
            .iter()
            .all(|z| z.im.abs() < 1e-12 && z.re.abs() <= 2.0 + 1e-12));
        assert!(theta_scan_spectrum(&a, 1).is_err());
    }

    #[test]
    fn example_roots_have_small_residual() {
        let r = |v: f64| c(v, 0.0);
        let i = |v: f64| c(0.0, v);
        let a = BandedPeriodicOperator::tridiagonal(
            &[r(1.0), r(0.0), r(1.0), r(0.0), r(2.0)],
            &[r(-1.0), r(-2.0), r(1.0), i(3.0), r(-5.0)],
            &[i(2.0), i(-3.0), i(2.0), r(0.0), i(1.0)],
        )
        .unwrap();
        let symbol = bloch_symbol(&a, 0.0).unwrap();
        let roots = char_poly_roots(&symbol).unwrap();
        assert_eq!(roots.len(), 5);
        for z in roots {
            let abs = crate::linalg::lu_det(&(&symbol - crate::linalg::CMatrix::identity(5, 5) * z)).norm();
            assert!(abs <= 1e-9, "residual {abs} at {z}");
            assert!(relative_residual(&symbol, z) <= 1e-9);
        }
    }
}
