//! One-periodic scalar potentials.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SpectraError};
use crate::expr::Expr;
use crate::tower::CutoffProfile;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Declared `(p, M)` with `M >= |V|_{W^{1,p}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevBound {
    pub p: f64,
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub enum PotentialKind {
    Expression {
        source: String,
        expr: Expr,
    },
    /// Samples at `x = i / len`, joined linearly and wrapped periodically.
    Table(Vec<Complex64>),
    /// Expression that is smooth away from `x0` and set to 0 there.
    Singular {
        source: String,
        expr: Expr,
        x0: f64,
    },
    /// `sum_q c_q exp(2 pi i q x)`.
    Trig(BTreeMap<i64, Complex64>),
    /// Pointwise product with a cutoff profile.
    Cutoff {
        base: Arc<PeriodicPotential>,
        profile: CutoffProfile,
    },
}

#[derive(Debug, Clone)]
pub struct PeriodicPotential {
    pub dimension: usize,
    pub kind: PotentialKind,
    pub sobolev: Option<SobolevBound>,
}

impl PeriodicPotential {
    fn with_kind(kind: PotentialKind) -> Self {
        PeriodicPotential {
            dimension: 1,
            kind,
            sobolev: None,
        }
    }

    pub fn expression(source: &str) -> Result<Self> {
        let expr = Expr::parse(source)?;
        Ok(Self::with_kind(PotentialKind::Expression {
            source: source.to_string(),
            expr,
        }))
    }

    pub fn table(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("samples", "table needs at least one sample"));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(invalid("samples", "table entries must be finite"));
        }
        Ok(Self::with_kind(PotentialKind::Table(samples)))
    }

    pub fn singular(source: &str, x0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x0) {
            return Err(invalid("x0", format!("must lie in [0, 1], got {x0}")));
        }
        let expr = Expr::parse(source)?;
        Ok(Self::with_kind(PotentialKind::Singular {
            source: source.to_string(),
            expr,
            x0: x0.rem_euclid(1.0),
        }))
    }

    /// Trigonometric polynomial `sum_q c_q exp(2 pi i q x)`.
    pub fn trig(coeffs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut map = BTreeMap::new();
        for (q, c) in coeffs {
            *map.entry(q).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Self::with_kind(PotentialKind::Trig(map))
    }

    /// `mu cos(2 pi x)`.
    pub fn mathieu(mu: Complex64) -> Self {
        Self::trig([(1, mu / 2.0), (-1, mu / 2.0)])
    }

    pub fn zero() -> Self {
        Self::trig(std::iter::empty())
    }

    pub fn cutoff(base: Arc<PeriodicPotential>, profile: CutoffProfile) -> Self {
        Self::with_kind(PotentialKind::Cutoff { base, profile })
    }

    pub fn with_sobolev(mut self, p: f64, norm: f64) -> Result<Self> {
        if !(p > self.dimension as f64) {
            return Err(invalid("p", format!("need p > d = {}, got {p}", self.dimension)));
        }
        if !(norm >= 0.0 && norm.is_finite()) {
            return Err(invalid("M", format!("must be finite and non-negative, got {norm}")));
        }
        self.sobolev = Some(SobolevBound { p, norm });
        Ok(self)
    }

    /// Short human-readable description for manifests.
    pub fn describe(&self) -> String {
        match &self.kind {
            PotentialKind::Expression { source, .. } => source.clone(),
            PotentialKind::Table(s) => format!("table of {} samples", s.len()),
            PotentialKind::Singular { source, x0, .. } => format!("{source} (singular at {x0})"),
            PotentialKind::Trig(c) => {
                let terms: Vec<String> = c.iter().map(|(q, v)| format!("({v})e^(2pi i {q} x)")).collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join(" + ")
                }
            }
            PotentialKind::Cutoff { base, profile } => {
                format!(
                    "cutoff(n = {}, center {}) * [{}]",
                    profile.n,
                    profile.center,
                    base.describe()
                )
            }
        }
    }

    /// Location of the marked singular point, if any.
    pub fn singular_point(&self) -> Option<f64> {
        match &self.kind {
            PotentialKind::Singular { x0, .. } => Some(*x0),
            PotentialKind::Cutoff { base, .. } => base.singular_point(),
            _ => None,
        }
    }

    /// Value at `x`; the argument is reduced to `[0, 1)` first.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if !x.is_finite() {
            return Err(SpectraError::PotentialEvaluation {
                x,
                reason: "non-finite argument".into(),
            });
        }
        let t = x.rem_euclid(1.0);
        let v = match &self.kind {
            PotentialKind::Expression { expr, .. } => expr.eval(t),
            PotentialKind::Table(samples) => {
                let len = samples.len();
                let pos = t * len as f64;
                let i = (pos.floor() as usize).min(len - 1);
                let frac = pos - i as f64;
                samples[i] * (1.0 - frac) + samples[(i + 1) % len] * frac
            }
            PotentialKind::Singular { expr, x0, .. } => {
                if t == *x0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    expr.eval(t)
                }
            }
            PotentialKind::Trig(c) => c
                .iter()
                .map(|(q, v)| v * Complex64::from_polar(1.0, TWO_PI * *q as f64 * t))
                .sum(),
            PotentialKind::Cutoff { base, profile } => {
                let r = profile.eval(t);
                if r == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    base.eval(t)? * r
                }
            }
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(SpectraError::PotentialEvaluation {
                x,
                reason: format!("value {v} is not finite"),
            });
        }
        Ok(v)
    }

    /// Exact coefficient `int_0^1 V(x) exp(2 pi i q x) dx` for trigonometric
    /// polynomials.
    pub fn exact_fourier(&self, q: i64) -> Option<Complex64> {
        match &self.kind {
            PotentialKind::Trig(c) => Some(c.get(&-q).copied().unwrap_or(Complex64::new(0.0, 0.0))),
            _ => None,
        }
    }

    /// `sup |V|`, exact for tables and trigonometric polynomials (upper
    /// bound by the coefficient sum), sampled on 4096 points otherwise.
    pub fn sup_norm_estimate(&self) -> Result<f64> {
        match &self.kind {
            PotentialKind::Table(s) => Ok(s.iter().map(|z| z.norm()).fold(0.0, f64::max)),
            PotentialKind::Trig(c) => Ok(c.values().map(|z| z.norm()).sum()),
            _ => {
                let mut best: f64 = 0.0;
                for i in 0..4096 {
                    best = best.max(self.eval(i as f64 / 4096.0)?.norm());
                }
                Ok(best)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodicity_on_probe_grid() {
        let pots = [
            PeriodicPotential::expression("3*cos(2*pi*x) + sin(4*pi*x)").unwrap(),
            PeriodicPotential::table(vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 2.0),
                Complex64::new(0.5, 0.0),
            ])
            .unwrap(),
            PeriodicPotential::mathieu(Complex64::new(0.0, 10.0)),
        ];
        for v in &pots {
            for i in 0..50 {
                let x = i as f64 / 50.0 + 0.013;
                let a = v.eval(x).unwrap();
                let b = v.eval(x + 1.0).unwrap();
                assert!((a - b).norm() < 1e-12, "{}", v.describe());
            }
        }
    }

    #[test]
    fn singular_kind_is_zero_at_marked_point() {
        let v = PeriodicPotential::singular("log(abs(x - 0.25))", 0.25).unwrap();
        assert_eq!(v.eval(0.25).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(v.eval(1.25).unwrap(), Complex64::new(0.0, 0.0));
        assert!((v.eval(0.5).unwrap().re - 0.25f64.ln()).abs() < 1e-14);
        // Same expression without the mark fails at the singularity.
        let raw = PeriodicPotential::expression("log(abs(x - 0.25))").unwrap();
        assert!(raw.eval(0.25).is_err());
    }

    #[test]
    fn table_interpolates_linearly_and_wraps() {
        let v = PeriodicPotential::table(vec![Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)]).unwrap();
        assert_eq!(v.eval(0.25).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(v.eval(0.5).unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(v.eval(0.75).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn trig_matches_its_expression() {
        let v = PeriodicPotential::mathieu(Complex64::new(2.0, 0.0));
        let e = PeriodicPotential::expression("2*cos(2*pi*x)").unwrap();
        for i in 0..64 {
            let x = i as f64 / 64.0;
            assert!((v.eval(x).unwrap() - e.eval(x).unwrap()).norm() < 1e-12);
        }
        assert_eq!(v.exact_fourier(1), Some(Complex64::new(1.0, 0.0)));
        assert_eq!(v.exact_fourier(2), Some(Complex64::new(0.0, 0.0)));
        assert_eq!(e.exact_fourier(1), None);
    }

    #[test]
    fn sobolev_metadata_validated() {
        assert!(PeriodicPotential::zero().with_sobolev(1.0, 1.0).is_err());
        assert!(PeriodicPotential::zero().with_sobolev(2.0, -1.0).is_err());
        assert!(PeriodicPotential::zero()
            .with_sobolev(2.0, 0.0)
            .unwrap()
            .sobolev
            .is_some());
    }
}
