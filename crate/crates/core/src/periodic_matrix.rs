//! Spectra of banded periodic bi-infinite matrices.
//!
//! The operator is stored by one period of diagonals. Its spectrum is the
//! union over the quasi-momentum of the spectra of the `N x N` Bloch symbols,
//! and the certified algorithm thresholds `|det(A(theta) - z)|` on a lattice.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{Certificate, RequiredResolution, SpectralCloud};
use crate::error::{invalid, Result, SpectraError};
use crate::linalg::{self, CMatrix, ZERO};
use crate::scan::{threshold_scan, ClosedDisk, FactoredModulus, LatticeRect, ScanOptions};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Period-`N`, bandwidth-`b` operator. `diagonals[i][k + b]` is the entry
/// `A_{i, i+k}` for row `i` of the reference period.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedPeriodicOperator {
    period: usize,
    bandwidth: usize,
    diagonals: Vec<Vec<Complex64>>,
}

impl BandedPeriodicOperator {
    pub fn new(period: usize, bandwidth: usize, diagonals: Vec<Vec<Complex64>>) -> Result<Self> {
        if period == 0 {
            return Err(invalid("period", "must be positive"));
        }
        if diagonals.len() != period {
            return Err(invalid(
                "diagonals",
                format!("expected {period} rows, got {}", diagonals.len()),
            ));
        }
        for (i, row) in diagonals.iter().enumerate() {
            if row.len() != 2 * bandwidth + 1 {
                return Err(invalid(
                    "diagonals",
                    format!("row {i} has {} entries, expected {}", row.len(), 2 * bandwidth + 1),
                ));
            }
            if row.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(invalid("diagonals", format!("row {i} has a non-finite entry")));
            }
        }
        Ok(BandedPeriodicOperator {
            period,
            bandwidth,
            diagonals,
        })
    }

    /// Period-`N` tridiagonal operator with `A_{i,i} = main[i]`,
    /// `A_{i,i+1} = upper[i]` and `A_{i,i-1} = lower[i]`.
    pub fn tridiagonal(main: &[Complex64], upper: &[Complex64], lower: &[Complex64]) -> Result<Self> {
        if main.len() != upper.len() || main.len() != lower.len() {
            return Err(invalid("diagonals", "tridiagonal rows must have equal length"));
        }
        let rows = (0..main.len()).map(|i| vec![lower[i], main[i], upper[i]]).collect();
        Self::new(main.len(), 1, rows)
    }

    /// Laurent (period-1) operator from its symbol coefficients `A_{0,k}`,
    /// `k = -b..=b`.
    pub fn laurent(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(invalid("coeffs", "need an odd number of coefficients"));
        }
        let b = coeffs.len() / 2;
        Self::new(1, b, vec![coeffs])
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn diagonals(&self) -> &[Vec<Complex64>] {
        &self.diagonals
    }

    /// Entry `A_{m,n}` of the bi-infinite matrix.
    pub fn entry(&self, m: i64, n: i64) -> Complex64 {
        let k = n - m;
        if k.unsigned_abs() as usize > self.bandwidth {
            return ZERO;
        }
        let row = m.rem_euclid(self.period as i64) as usize;
        self.diagonals[row][(k + self.bandwidth as i64) as usize]
    }

    /// Largest entry modulus; equals the sup over the whole matrix.
    pub fn sup_norm(&self) -> f64 {
        self.diagonals.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Drops outer diagonals that vanish in every row.
    pub fn trimmed(&self) -> Self {
        let b = self.bandwidth;
        let mut keep = 0;
        for k in 1..=b {
            let used = self
                .diagonals
                .iter()
                .any(|row| row[b - k] != ZERO || row[b + k] != ZERO);
            if used {
                keep = k;
            }
        }
        let rows = self
            .diagonals
            .iter()
            .map(|row| row[b - keep..=b + keep].to_vec())
            .collect();
        BandedPeriodicOperator {
            period: self.period,
            bandwidth: keep,
            diagonals: rows,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: OperatorDoc = serde_json::from_str(text).map_err(|e| SpectraError::Format(e.to_string()))?;
        let rows = doc
            .diagonals
            .into_iter()
            .map(|row| row.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Self::new(doc.period, doc.bandwidth, rows)
    }

    pub fn to_json(&self) -> String {
        let doc = OperatorDoc {
            period: self.period,
            bandwidth: self.bandwidth,
            diagonals: self
                .diagonals
                .iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("operator serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorDoc {
    period: usize,
    bandwidth: usize,
    diagonals: Vec<Vec<[f64; 2]>>,
}

/// Result of reading a finite section and searching it for repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodDetection {
    pub operator: BandedPeriodicOperator,
    /// Half-width `n` of the section that was read.
    pub window: usize,
    /// False when no period below `n` was found and the fallback `n` was used.
    pub period_found: bool,
}

/// Reads rows `d_i = (a_{i,i-n}, ..., a_{i,i+n})` for `|i| <= n`, takes the
/// smallest `p < n` with `d_{i+p} = d_i` for `i = p..=n-p`, and extends the
/// rows periodically. The period is fixed first and the bandwidth trimmed
/// afterwards.
pub fn detect_period<F>(mut oracle: F, n: usize) -> Result<PeriodDetection>
where
    F: FnMut(i64, i64) -> Result<Complex64>,
{
    if n < 1 {
        return Err(SpectraError::WindowTooSmall(n));
    }
    let ni = n as i64;
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(2 * n + 1);
    for i in -ni..=ni {
        let mut row = Vec::with_capacity(2 * n + 1);
        for j in i - ni..=i + ni {
            let v = oracle(i, j).map_err(|e| SpectraError::OracleFailure {
                row: i,
                col: j,
                reason: e.to_string(),
            })?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(SpectraError::OracleFailure {
                    row: i,
                    col: j,
                    reason: "non-finite entry".into(),
                });
            }
            row.push(v);
        }
        rows.push(row);
    }
    let row_of = |i: i64| &rows[(i + ni) as usize];
    let found = (1..n).find(|&p| {
        let p = p as i64;
        (p..=ni - p).all(|i| row_of(i + p) == row_of(i))
    });
    let period = found.unwrap_or(n);
    let diagonals = (0..period as i64).map(|i| row_of(i).clone()).collect();
    let operator = BandedPeriodicOperator::new(period, n, diagonals)?.trimmed();
    Ok(PeriodDetection {
        operator,
        window: n,
        period_found: found.is_some(),
    })
}

/// Bloch symbol `A(theta)` for `theta` in `[0, 2 pi]`.
pub fn bloch_symbol(a: &BandedPeriodicOperator, theta: f64) -> Result<CMatrix> {
    if !(0.0..=TWO_PI).contains(&theta) {
        return Err(invalid("theta", format!("must lie in [0, 2pi], got {theta}")));
    }
    Ok(bloch_symbol_unchecked(a, theta))
}

/// Same as [`bloch_symbol`] for any real `theta`; the formula is
/// well defined everywhere and periodic up to similarity.
pub fn bloch_symbol_unchecked(a: &BandedPeriodicOperator, theta: f64) -> CMatrix {
    let n = a.period;
    let b = a.bandwidth as i64;
    let mut m = CMatrix::zeros(n, n);
    for row in 0..n {
        for k in -b..=b {
            let v = a.diagonals[row][(k + b) as usize];
            if v == ZERO {
                continue;
            }
            let col = (row as i64 + k).rem_euclid(n as i64) as usize;
            let phase = Complex64::from_polar(1.0, theta * k as f64 / n as f64);
            m[(row, col)] += phase * v;
        }
    }
    m
}

/// `R_A`: sum of the entry moduli over one period, a bound for the norm.
pub fn spectral_radius_bound(a: &BandedPeriodicOperator) -> f64 {
    a.diagonals.iter().flatten().map(|z| z.norm()).sum()
}

/// Natural log of the determinant Lipschitz constant
/// `N^(N/2+2) ((2b+1)|A|_inf + R)^N (2b+1)^2 |A|_inf`.
pub fn log_det_lipschitz_constant(a: &BandedPeriodicOperator, r: f64) -> f64 {
    let n = a.period as f64;
    let w = (2 * a.bandwidth + 1) as f64;
    let sup = a.sup_norm();
    (n / 2.0 + 2.0) * n.ln() + n * (w * sup + r).ln() + 2.0 * w.ln() + sup.ln()
}

pub fn det_lipschitz_constant(a: &BandedPeriodicOperator, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("R", format!("must be positive, got {r}")));
    }
    Ok(log_det_lipschitz_constant(a, r).exp())
}

/// Smallest `n` beyond `max{delta^(-2N), (2 L(R_A))^2}`; past `i64::MAX`
/// the value comes back flagged.
pub fn required_resolution(a: &BandedPeriodicOperator, delta: f64) -> Result<RequiredResolution> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", format!("must be positive, got {delta}")));
    }
    let n = a.period as f64;
    let r = spectral_radius_bound(a);
    let from_delta = -2.0 * n * delta.ln();
    let from_lipschitz = 2.0 * (std::f64::consts::LN_2 + log_det_lipschitz_constant(a, r));
    let log_rhs = from_delta.max(from_lipschitz);
    Ok(RequiredResolution::from_log(log_rhs))
}

/// Quasi-momenta `2 pi (i-1)/(n-1)`, `i = 1..=n`; just `0` when `n = 1`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| TWO_PI * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MatrixScanConfig {
    /// Refuse lattices with more points than this.
    pub point_budget: f64,
    pub scan: ScanOptions,
}

impl Default for MatrixScanConfig {
    fn default() -> Self {
        MatrixScanConfig {
            point_budget: 1e12,
            scan: ScanOptions::default(),
        }
    }
}

/// The certified algorithm: lattice points `z` of `(1/n)(Z + iZ)` with
/// `|z| <= R_A` and `|det(A(theta_i) - z)| <= n^(-1/2)` for some `theta_i`.
pub fn gamma_n_matrix(a: &BandedPeriodicOperator, n: usize) -> Result<SpectralCloud> {
    gamma_n_matrix_with(a, n, &MatrixScanConfig::default())
}

pub fn gamma_n_matrix_with(a: &BandedPeriodicOperator, n: usize, config: &MatrixScanConfig) -> Result<SpectralCloud> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let radius = spectral_radius_bound(a);
    let h = 1.0 / n as f64;
    let steps = (radius * n as f64).floor();
    let requested = (2.0 * steps + 1.0).powi(2) * n as f64;
    if requested > config.point_budget {
        return Err(SpectraError::PointBudgetExceeded {
            requested,
            budget: config.point_budget,
        });
    }
    let steps = steps as i64;
    let rect = LatticeRect {
        i0: -steps,
        i1: steps,
        j0: -steps,
        j1: steps,
    };
    let region = ClosedDisk { h, radius };
    let tau = (n as f64).powf(-0.5);
    let dim = a.period;

    let per_theta: Vec<Vec<(i64, i64)>> = theta_grid(n)
        .into_par_iter()
        .map(|theta| -> Result<Vec<(i64, i64)>> {
            let symbol = bloch_symbol_unchecked(a, theta);
            let roots = linalg::eigenvalues(&symbol)?;
            let scale = 1.0 + linalg::max_abs(&symbol) * dim as f64;
            let model = FactoredModulus {
                roots,
                poles: Vec::new(),
                slack: 1e-6 * scale,
            };
            let mut buf = vec![ZERO; dim * dim];
            let mut out = Vec::new();
            threshold_scan(
                rect,
                h,
                &model,
                tau.ln(),
                &region,
                config.scan,
                |i, j| {
                    let z = Complex64::new(i as f64 * h, j as f64 * h);
                    for r in 0..dim {
                        for c in 0..dim {
                            buf[r * dim + c] = symbol[(r, c)];
                        }
                        buf[r * dim + r] -= z;
                    }
                    linalg::det_in_place(&mut buf, dim).norm() <= tau
                },
                &mut out,
            );
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let merged: BTreeSet<(i64, i64)> = per_theta.into_iter().flatten().collect();
    let mut cloud = SpectralCloud::from_lattice(merged, n as f64);
    let outer = (n as f64).powf(-1.0 / (2.0 * dim as f64));
    let coverage = 1.0 / n as f64;
    let required = required_resolution(a, coverage)?;
    cloud.certificate = Some(Certificate {
        outer_radius: outer,
        coverage_radius: coverage,
        required_resolution: required,
        coverage_certified: required.is_reached_by(n as u64),
        context: format!(
            "banded periodic scan: period {dim}, bandwidth {}, n = {n}, threshold n^(-1/2), outer radius n^(-1/(2N))",
            a.bandwidth
        ),
    });
    cloud.metadata.insert("algorithm".into(), "periodic_matrix".into());
    cloud.metadata.insert("n".into(), n.to_string());
    cloud.metadata.insert("period".into(), dim.to_string());
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn example() -> BandedPeriodicOperator {
        let r = |v: f64| c(v, 0.0);
        let i = |v: f64| c(0.0, v);
        BandedPeriodicOperator::tridiagonal(
            &[r(1.0), r(0.0), r(1.0), r(0.0), r(2.0)],
            &[r(-1.0), r(-2.0), r(1.0), i(3.0), r(-5.0)],
            &[i(2.0), i(-3.0), i(2.0), r(0.0), i(1.0)],
        )
        .unwrap()
    }

    fn shift() -> BandedPeriodicOperator {
        BandedPeriodicOperator::laurent(vec![ZERO, ZERO, c(1.0, 0.0)]).unwrap()
    }

    fn char_coeffs(m: &CMatrix) -> Vec<Complex64> {
        crate::oracles::charpoly::characteristic_coefficients(m)
    }

    #[test]
    fn radius_of_example_is_24() {
        assert!((spectral_radius_bound(&example()) - 24.0).abs() < 1e-12);
        assert_eq!(spectral_radius_bound(&shift()), 1.0);
        let zero = BandedPeriodicOperator::new(1, 0, vec![vec![ZERO]]).unwrap();
        assert_eq!(spectral_radius_bound(&zero), 0.0);
    }

    #[test]
    fn detects_shift_and_example_period() {
        let s = shift();
        let det = detect_period(|i, j| Ok(s.entry(i, j)), 4).unwrap();
        assert_eq!(det.operator.period(), 1);
        assert_eq!(det.operator.bandwidth(), 1);
        assert!(det.period_found);

        let a = example();
        let det = detect_period(|i, j| Ok(a.entry(i, j)), 12).unwrap();
        assert_eq!(det.operator.period(), 5);
        assert_eq!(det.operator.bandwidth(), 1);
        assert_eq!(det.operator, a);
    }

    #[test]
    fn short_window_gives_provisional_period() {
        let a = BandedPeriodicOperator::tridiagonal(
            &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
            &[c(1.0, 0.0); 3],
            &[c(1.0, 0.0); 3],
        )
        .unwrap();
        // Brute-force smallest period of the generated rows.
        let brute = (1..=6)
            .find(|&p| (-20i64..20).all(|i| (i - 3..=i + 3).all(|j| a.entry(i, j) == a.entry(i + p, j + p))))
            .unwrap();
        assert_eq!(brute, 3);
        let small = detect_period(|i, j| Ok(a.entry(i, j)), 4).unwrap();
        assert_eq!(small.window, 4);
        assert!(small.operator.period() == 3 || !small.period_found);
        for n in 7..12 {
            let d = detect_period(|i, j| Ok(a.entry(i, j)), n).unwrap();
            assert_eq!(d.operator.period(), 3, "n = {n}");
        }
    }

    #[test]
    fn oracle_failure_and_tiny_window() {
        assert_eq!(
            detect_period(|_, _| Ok(ZERO), 0).unwrap_err(),
            SpectraError::WindowTooSmall(0)
        );
        let err = detect_period(|i, _| if i == 2 { Err(SpectraError::EmptySet) } else { Ok(ZERO) }, 3).unwrap_err();
        assert!(matches!(err, SpectraError::OracleFailure { row: 2, .. }));
    }

    #[test]
    fn symbol_of_shift_and_tridiagonal() {
        let theta = 0.7;
        let s = bloch_symbol(&shift(), theta).unwrap();
        assert!((s[(0, 0)] - Complex64::from_polar(1.0, theta)).norm() < 1e-15);

        let a = example();
        let m = bloch_symbol(&a, theta).unwrap();
        let e = Complex64::from_polar(1.0, theta / 5.0);
        let d = a.diagonals();
        assert_eq!(m[(0, 0)], d[0][1]);
        assert!((m[(0, 1)] - d[0][2] * e).norm() < 1e-15);
        assert!((m[(1, 0)] - d[1][0] / e).norm() < 1e-15);
        assert!((m[(0, 4)] - d[0][0] / e).norm() < 1e-15);
        assert!((m[(4, 0)] - d[4][2] * e).norm() < 1e-15);
        assert_eq!(m[(0, 2)], ZERO);
        assert!(bloch_symbol(&a, -0.1).is_err());
        assert!(bloch_symbol(&a, 7.0).is_err());
    }

    #[test]
    fn symbol_at_zero_sums_folded_entries() {
        // Bandwidth 2 on period 2 folds two diagonals onto each column.
        let rows = vec![
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0), c(5.0, 0.0)],
            vec![c(0.0, 1.0), c(0.0, 2.0), c(0.0, 3.0), c(0.0, 4.0), c(0.0, 5.0)],
        ];
        let a = BandedPeriodicOperator::new(2, 2, rows).unwrap();
        let m = bloch_symbol(&a, 0.0).unwrap();
        for r in 0..2i64 {
            for col in 0..2i64 {
                let direct: Complex64 = (-3..=3).map(|jp| a.entry(r, jp * 2 + col)).sum();
                assert!((m[(r as usize, col as usize)] - direct).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn lipschitz_closed_form() {
        let cval = 1.5;
        let a = BandedPeriodicOperator::new(1, 0, vec![vec![c(cval, 0.0)]]).unwrap();
        let r = 2.0;
        let l = det_lipschitz_constant(&a, r).unwrap();
        assert!((l - (cval + r) * cval).abs() < 1e-12);
        assert!(det_lipschitz_constant(&a, 0.0).is_err());

        let ex = example();
        let doubled = BandedPeriodicOperator::new(
            5,
            1,
            ex.diagonals()
                .iter()
                .map(|row| row.iter().map(|z| z * 2.0).collect())
                .collect(),
        )
        .unwrap();
        let r = spectral_radius_bound(&ex);
        assert!(det_lipschitz_constant(&doubled, r).unwrap() > det_lipschitz_constant(&ex, r).unwrap());
    }

    #[test]
    fn required_resolution_values() {
        let zero = BandedPeriodicOperator::new(1, 0, vec![vec![ZERO]]).unwrap();
        assert_eq!(
            required_resolution(&zero, 1.0).unwrap(),
            RequiredResolution::Exact { n: 2 }
        );

        // Shift: N = 1, b = 1, |A| = 1, R = 1, so L = 1 * (3 + 1) * 9 * 1 = 36.
        let rr = required_resolution(&shift(), 0.5).unwrap();
        assert_eq!(rr, RequiredResolution::Exact { n: 72 * 72 + 1 });

        match required_resolution(&example(), 0.5).unwrap() {
            RequiredResolution::Overflow { log10, .. } => assert!(log10 > 18.0),
            other => panic!("expected overflow flag, got {other:?}"),
        }
        assert!(required_resolution(&shift(), 0.0).is_err());
    }

    #[test]
    fn identity_scan_matches_scalar_threshold() {
        let a = BandedPeriodicOperator::new(1, 0, vec![vec![c(1.0, 0.0)]]).unwrap();
        // 43 is not a sum of two squares, so no lattice point sits on the threshold circle.
        let n = 43;
        let cloud = gamma_n_matrix(&a, n).unwrap();
        let tau = (n as f64).powf(-0.5);
        let mut expected = Vec::new();
        for i in -43i64..=43 {
            for j in -43i64..=43 {
                let z = c(i as f64 / n as f64, j as f64 / n as f64);
                if z.norm() <= 1.0 && (c(1.0, 0.0) - z).norm() <= tau {
                    expected.push(z);
                }
            }
        }
        assert_eq!(cloud.points, expected);
        let cert = cloud.certificate.unwrap();
        assert_eq!(cert.outer_radius, tau);
        assert_eq!(cert.coverage_radius, 1.0 / 43.0);
    }

    #[test]
    fn pruned_scan_equals_exhaustive_scan() {
        let a = example();
        for n in [6, 11] {
            let fast = gamma_n_matrix(&a, n).unwrap();
            let slow = gamma_n_matrix_with(
                &a,
                n,
                &MatrixScanConfig {
                    scan: ScanOptions {
                        exhaustive: true,
                        ..Default::default()
                    },
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(fast.points, slow.points, "n = {n}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = MatrixScanConfig {
            point_budget: 10.0,
            ..Default::default()
        };
        assert!(matches!(
            gamma_n_matrix_with(&example(), 5, &cfg),
            Err(SpectraError::PointBudgetExceeded { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let a = example();
        let back = BandedPeriodicOperator::from_json(&a.to_json()).unwrap();
        assert_eq!(a, back);
        assert!(BandedPeriodicOperator::from_json(r#"{"period":1,"bandwidth":1,"diagonals":[[[0,0]]]}"#).is_err());
    }

    #[test]
    fn sampled_determinants_obey_lipschitz_bound() {
        use rand::{Rng, SeedableRng};
        let a = example();
        let r = spectral_radius_bound(&a);
        let l = det_lipschitz_constant(&a, r).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let disk = |rng: &mut rand::rngs::StdRng| loop {
            let z = c(rng.gen_range(-r..r), rng.gen_range(-r..r));
            if z.norm() <= r {
                return z;
            }
        };
        for _ in 0..100 {
            let (z, w) = (disk(&mut rng), disk(&mut rng));
            let (t, s) = (rng.gen_range(0.0..TWO_PI), rng.gen_range(0.0..TWO_PI));
            let dz = linalg::lu_det(&(bloch_symbol(&a, t).unwrap() - CMatrix::identity(5, 5) * z));
            let dw = linalg::lu_det(&(bloch_symbol(&a, s).unwrap() - CMatrix::identity(5, 5) * w));
            assert!((dz - dw).norm() <= l * ((z - w).norm() + (t - s).abs()));
        }
    }

    fn arb_operator() -> impl Strategy<Value = BandedPeriodicOperator> {
        (1usize..5, 0usize..3).prop_flat_map(|(n, b)| {
            prop::collection::vec(prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2 * b + 1), n).prop_map(
                move |rows| {
                    let rows = rows
                        .into_iter()
                        .map(|row| row.into_iter().map(|(re, im)| c(re, im)).collect())
                        .collect();
                    BandedPeriodicOperator::new(n, b, rows).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn symbol_similarity_over_a_full_turn(a in arb_operator(), theta in 0.0f64..TWO_PI) {
            let n = a.period();
            let d = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::from_polar(1.0, TWO_PI * i as f64 / n as f64) } else { ZERO });
            let d_inv = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::from_polar(1.0, -TWO_PI * i as f64 / n as f64) } else { ZERO });
            let base = bloch_symbol_unchecked(&a, theta);
            let turned = &d_inv * bloch_symbol_unchecked(&a, theta + TWO_PI) * &d;
            let p = char_coeffs(&base);
            let q = char_coeffs(&turned);
            let scale = p.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (x, y) in p.iter().zip(&q) {
                prop_assert!((x - y).norm() <= 1e-12 * scale);
            }
            let undone = &d * bloch_symbol_unchecked(&a, theta + TWO_PI) * &d_inv;
            prop_assert!((undone - base).iter().all(|z| z.norm() < 1e-12));
        }

        #[test]
        fn trace_is_theta_independent(a in arb_operator(), t1 in 0.0f64..TWO_PI, t2 in 0.0f64..TWO_PI) {
            prop_assume!(a.bandwidth() < a.period());
            let x = linalg::trace(&bloch_symbol(&a, t1).unwrap());
            let y = linalg::trace(&bloch_symbol(&a, t2).unwrap());
            prop_assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()));
        }
    }
}
