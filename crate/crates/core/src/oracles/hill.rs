//! Hill discriminant of `-u'' + V u = lambda u` on one period.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::SpectralCloud;
use crate::error::{invalid, Result, SpectraError};
use crate::potential::PeriodicPotential;

const MIN_STEPS: usize = 16;
const OVERFLOW: f64 = 1e250;

/// Half-trace of the monodromy matrix and its determinant, which equals 1
/// for the exact flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discriminant {
    pub value: Complex64,
    pub wronskian: Complex64,
}

/// Potential sampled at the RK4 nodes `j / (2 steps)` of one period.
#[derive(Debug, Clone)]
pub struct HillIntegrator {
    steps: usize,
    half_nodes: Vec<Complex64>,
}

impl HillIntegrator {
    pub fn new(v: &PeriodicPotential, steps: usize) -> Result<Self> {
        if steps < MIN_STEPS {
            return Err(invalid("steps", format!("need at least {MIN_STEPS}, got {steps}")));
        }
        let half_nodes = (0..=2 * steps)
            .map(|j| v.eval(j as f64 / (2 * steps) as f64))
            .collect::<Result<_>>()?;
        Ok(HillIntegrator { steps, half_nodes })
    }

    pub fn discriminant(&self, lambda: Complex64) -> Result<Discriminant> {
        let h = 1.0 / self.steps as f64;
        // Columns: (phi1, phi1'), (phi2, phi2').
        let mut y = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        for i in 0..self.steps {
            let q0 = self.half_nodes[2 * i] - lambda;
            let q1 = self.half_nodes[2 * i + 1] - lambda;
            let q2 = self.half_nodes[2 * i + 2] - lambda;
            for col in y.iter_mut() {
                let [u, du] = *col;
                let (k1u, k1d) = (du, q0 * u);
                let (k2u, k2d) = (du + 0.5 * h * k1d, q1 * (u + 0.5 * h * k1u));
                let (k3u, k3d) = (du + 0.5 * h * k2d, q1 * (u + 0.5 * h * k2u));
                let (k4u, k4d) = (du + h * k3d, q2 * (u + h * k3u));
                col[0] = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
                col[1] = du + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            }
            let size = y.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
            if !(size < OVERFLOW) {
                return Err(SpectraError::Overflow {
                    lambda,
                    magnitude: size,
                });
            }
        }
        Ok(Discriminant {
            value: 0.5 * (y[0][0] + y[1][1]),
            wronskian: y[0][0] * y[1][1] - y[1][0] * y[0][1],
        })
    }
}

pub fn hill_discriminant(v: &PeriodicPotential, lambda: Complex64, steps: usize) -> Result<Discriminant> {
    HillIntegrator::new(v, steps)?.discriminant(lambda)
}

/// Distance from `d` to the real segment `[-1, 1]`.
pub fn distance_to_unit_segment(d: Complex64) -> f64 {
    let dx = (d.re.abs() - 1.0).max(0.0);
    dx.hypot(d.im)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantTrace {
    pub lambda_grid: Vec<Complex64>,
    pub d_values: Vec<Complex64>,
    pub softening: f64,
}

impl DiscriminantTrace {
    pub fn compute(v: &PeriodicPotential, grid: &[Complex64], tau: f64, steps: usize) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(invalid("tau", format!("must be finite and non-negative, got {tau}")));
        }
        let integrator = HillIntegrator::new(v, steps)?;
        let d_values = grid
            .par_iter()
            .map(|&l| integrator.discriminant(l).map(|d| d.value))
            .collect::<Result<Vec<_>>>()?;
        Ok(DiscriminantTrace {
            lambda_grid: grid.to_vec(),
            d_values,
            softening: tau,
        })
    }

    pub fn members(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.lambda_grid
            .iter()
            .zip(&self.d_values)
            .filter(|(_, d)| distance_to_unit_segment(**d) <= self.softening)
            .map(|(l, _)| *l)
    }
}

/// Grid points whose discriminant lies within `tau` of `[-1, 1]`.
pub fn discriminant_spectrum(
    v: &PeriodicPotential,
    grid: &[Complex64],
    tau: f64,
    steps: usize,
) -> Result<SpectralCloud> {
    let trace = DiscriminantTrace::compute(v, grid, tau, steps)?;
    let mut cloud = SpectralCloud::new(trace.members().collect(), 0.0);
    cloud.metadata.insert("algorithm".into(), "hill_discriminant".into());
    cloud.metadata.insert("potential".into(), v.describe());
    cloud.metadata.insert("tau".into(), tau.to_string());
    cloud.metadata.insert("steps".into(), steps.to_string());
    Ok(cloud)
}

/// Grid points within about `radius` of the spectrum, using the first-order
/// distance `dist(D, [-1, 1]) / |D'|`. Unlike a fixed softening in the
/// `D`-plane this does not swell where `D` is flat.
pub fn discriminant_neighbourhood(
    v: &PeriodicPotential,
    grid: &[Complex64],
    radius: f64,
    steps: usize,
) -> Result<SpectralCloud> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(invalid(
            "radius",
            format!("must be finite and non-negative, got {radius}"),
        ));
    }
    let integrator = HillIntegrator::new(v, steps)?;
    let keep = grid
        .par_iter()
        .map(|&l| {
            let d = integrator.discriminant(l)?.value;
            let gap = distance_to_unit_segment(d);
            if gap == 0.0 {
                return Ok(true);
            }
            let eps = 1e-6 * (1.0 + l.norm());
            let step = Complex64::new(eps, 0.0);
            let slope =
                (integrator.discriminant(l + step)?.value - integrator.discriminant(l - step)?.value) / (2.0 * eps);
            Ok(gap <= radius * slope.norm())
        })
        .collect::<Result<Vec<bool>>>()?;
    let points = grid.iter().zip(keep).filter(|(_, k)| *k).map(|(l, _)| *l).collect();
    let mut cloud = SpectralCloud::new(points, 0.0);
    cloud.metadata.insert("algorithm".into(), "hill_neighbourhood".into());
    cloud.metadata.insert("potential".into(), v.describe());
    cloud.metadata.insert("radius".into(), radius.to_string());
    cloud.metadata.insert("steps".into(), steps.to_string());
    Ok(cloud)
}

/// Rectangular grid with the given spacing covering the window, lower-left
/// corner included.
pub fn window_grid(re: (f64, f64), im: (f64, f64), spacing: f64) -> Result<Vec<Complex64>> {
    if !(spacing > 0.0) || re.0 > re.1 || im.0 > im.1 {
        return Err(invalid("grid", "need positive spacing and ordered bounds"));
    }
    let nr = ((re.1 - re.0) / spacing + 1e-9).floor() as usize;
    let ni = ((im.1 - im.0) / spacing + 1e-9).floor() as usize;
    Ok((0..=nr)
        .flat_map(|a| (0..=ni).map(move |b| Complex64::new(re.0 + a as f64 * spacing, im.0 + b as f64 * spacing)))
        .collect())
}

/// Real intervals in `[lo, hi]` where `|D| > 1` (for real `V`), with
/// endpoints refined by bisection on `|D| = 1`.
pub fn real_gaps(v: &PeriodicPotential, lo: f64, hi: f64, samples: usize, steps: usize) -> Result<Vec<(f64, f64)>> {
    if samples < 2 || !(lo < hi) {
        return Err(invalid("samples", "need at least 2 samples on a non-empty interval"));
    }
    let integrator = HillIntegrator::new(v, steps)?;
    let excess = |l: f64| -> Result<f64> { Ok(integrator.discriminant(Complex64::new(l, 0.0))?.value.re.abs() - 1.0) };
    let xs: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let fs = xs.iter().map(|&x| excess(x)).collect::<Result<Vec<_>>>()?;
    let refine = |mut a: f64, mut b: f64| -> Result<f64> {
        // excess(a) and excess(b) have opposite signs.
        let sa = excess(a)? > 0.0;
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if (excess(m)? > 0.0) == sa {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    };
    let mut gaps = Vec::new();
    let mut start: Option<f64> = None;
    for i in 0..samples {
        let inside = fs[i] > 0.0;
        match (inside, start) {
            (true, None) => start = Some(if i == 0 { lo } else { refine(xs[i - 1], xs[i])? }),
            (false, Some(s)) => {
                gaps.push((s, refine(xs[i - 1], xs[i])?));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        gaps.push((s, hi));
    }
    Ok(gaps)
}
