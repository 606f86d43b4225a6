//! Point clouds produced by the grid scans, their certificates, and the
//! CSV / JSON formats they are exchanged in.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};

/// Smallest admissible resolution from the closed-form bound. The bound
/// grows like `N^(N^2)`, so values past `i64::MAX` are kept as a flagged real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RequiredResolution {
    NotComputed,
    Exact { n: u64 },
    Overflow { value: f64, log10: f64 },
}

impl RequiredResolution {
    /// Builds the smallest integer strictly exceeding `exp(log_value)`.
    pub fn from_log(log_value: f64) -> Self {
        const LIMIT: f64 = 9.223_372_036_854_775e18;
        if log_value.is_nan() {
            return RequiredResolution::NotComputed;
        }
        if log_value >= LIMIT.ln() {
            return RequiredResolution::Overflow {
                value: log_value.exp(),
                log10: log_value / std::f64::consts::LN_10,
            };
        }
        let value = log_value.exp();
        let n = value.floor() as u64 + 1;
        RequiredResolution::Exact { n }
    }

    pub fn is_reached_by(&self, n: u64) -> bool {
        match self {
            RequiredResolution::Exact { n: required } => n >= *required,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Every output point lies within this distance of the true spectrum.
    pub outer_radius: f64,
    /// Every spectral point lies within this distance of the output, once
    /// `coverage_certified` holds.
    pub coverage_radius: f64,
    pub required_resolution: RequiredResolution,
    pub coverage_certified: bool,
    pub context: String,
}

impl Certificate {
    pub fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("outer_radius", self.outer_radius),
            ("coverage_radius", self.coverage_radius),
        ] {
            if !(r.is_finite() && r > 0.0) {
                return Err(SpectraError::InvalidParameter {
                    name,
                    reason: format!("radius must be positive and finite, got {r}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectralCloud {
    pub points: Vec<Complex64>,
    /// Spacing of the scan lattice the points were drawn from.
    pub grid_spacing: f64,
    /// Per-point bit mask of the spectral shifts that produced it (bit `i`
    /// for shift `i`); empty when the scan has a single route.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shift_mask: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl SpectralCloud {
    pub fn new(points: Vec<Complex64>, grid_spacing: f64) -> Self {
        SpectralCloud {
            points,
            grid_spacing,
            ..Default::default()
        }
    }

    /// Builds a cloud from integer lattice coordinates `(a, b) -> (a + ib)/scale`.
    pub fn from_lattice(coords: impl IntoIterator<Item = (i64, i64)>, scale: f64) -> Self {
        let points = coords
            .into_iter()
            .map(|(a, b)| Complex64::new(a as f64 / scale, b as f64 / scale))
            .collect();
        SpectralCloud::new(points, 1.0 / scale)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points inside the closed rectangle `[re_min, re_max] x [im_min, im_max]`.
    pub fn restrict(&self, window: &Window) -> SpectralCloud {
        let mut out = SpectralCloud {
            grid_spacing: self.grid_spacing,
            certificate: self.certificate.clone(),
            metadata: self.metadata.clone(),
            ..Default::default()
        };
        for (idx, z) in self.points.iter().enumerate() {
            if window.contains(*z) {
                out.points.push(*z);
                if let Some(mask) = self.shift_mask.get(idx) {
                    out.shift_mask.push(*mask);
                }
            }
        }
        out
    }

    /// CSV with header `re,im` (or `re,im,shift_mask` when masks are set),
    /// floats in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let with_mask = !self.shift_mask.is_empty();
        let mut out = String::with_capacity(self.points.len() * 24 + 16);
        out.push_str(if with_mask { "re,im,shift_mask\n" } else { "re,im\n" });
        for (idx, z) in self.points.iter().enumerate() {
            if with_mask {
                let _ = writeln!(out, "{},{},{}", z.re, z.im, self.shift_mask[idx]);
            } else {
                let _ = writeln!(out, "{},{}", z.re, z.im);
            }
        }
        out
    }

    /// Parses the CSV written by [`SpectralCloud::to_csv`]. The grid spacing
    /// is not stored in the CSV and is set to zero.
    pub fn from_csv(text: &str) -> Result<SpectralCloud> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| SpectraError::Format("empty CSV".into()))?;
        let columns: Vec<&str> = header.split(',').map(str::trim).collect();
        let with_mask = match columns.as_slice() {
            ["re", "im"] => false,
            ["re", "im", "shift_mask"] => true,
            _ => return Err(SpectraError::Format(format!("unexpected CSV header `{header}`"))),
        };
        let mut cloud = SpectralCloud::default();
        for (lineno, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let expected = if with_mask { 3 } else { 2 };
            if fields.len() != expected {
                return Err(SpectraError::Format(format!(
                    "line {}: expected {expected} fields, got {}",
                    lineno + 2,
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| SpectraError::Format(format!("line {}: {e}", lineno + 2)))
            };
            cloud.points.push(Complex64::new(parse(fields[0])?, parse(fields[1])?));
            if with_mask {
                let mask = fields[2]
                    .parse::<u32>()
                    .map_err(|e| SpectraError::Format(format!("line {}: {e}", lineno + 2)))?;
                cloud.shift_mask.push(mask);
            }
        }
        Ok(cloud)
    }

    /// Complex conjugate of every point, re-sorted in lattice order.
    pub fn conjugate(&self) -> SpectralCloud {
        let mut pts: Vec<Complex64> = self.points.iter().map(|z| z.conj()).collect();
        sort_points(&mut pts);
        SpectralCloud::new(pts, self.grid_spacing)
    }
}

/// Sorts points by real part, then imaginary part.
pub fn sort_points(points: &mut [Complex64]) {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Closed axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let w = Window {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        if !(re_min <= re_max && im_min <= im_max) || ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) {
            return Err(SpectraError::InvalidParameter {
                name: "window",
                reason: format!("need finite re_min <= re_max and im_min <= im_max, got {w:?}"),
            });
        }
        Ok(w)
    }

    pub fn real_interval(re_min: f64, re_max: f64) -> Result<Self> {
        Window::new(re_min, re_max, 0.0, 0.0)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Shrinks (positive `margin`) or grows the window on every side.
    pub fn inset(&self, margin: f64) -> Window {
        Window {
            re_min: self.re_min + margin,
            re_max: self.re_max - margin,
            im_min: self.im_min + margin,
            im_max: self.im_max - margin,
        }
    }
}
