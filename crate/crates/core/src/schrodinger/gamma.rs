//! Determinant-threshold scans for periodic Schrodinger operators.
//!
//! For each quasi-momentum the section determinant factors as
//! `prod (z - g_i) / prod (z - shift - k_j^2)` with `g_i` the Galerkin
//! eigenvalues, which is what the practical scan evaluates and what the
//! rectangle pruning relies on. The LU mode evaluates the section itself and
//! the certified mode its regularized determinant.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{SpectralCloud, Window};
use crate::error::{invalid, Result};
use crate::linalg;
use crate::periodic_matrix::theta_grid;
use crate::potential::PeriodicPotential;
use crate::scan::{threshold_scan, FactoredModulus, LatticeRect, Region, ScanOptions};

use super::bounds::coupling_exponent;
use super::fourier::FourierTruncation;
use super::modes::ModeIndexing;
use super::section::{build_bs_section, galerkin_matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// Fixed `C` with the plain determinant and independent `n`.
    Value(f64),
    /// `C = K^-(1/2 - 1/(2p))`, `n = K^ceil(alpha)`, determinant of order `ceil(p)`.
    Certified,
    /// `C = 1/log K`, `n = min(ceil(e^K), cap)`.
    Parameterless,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaGrid {
    /// `theta in (1/K) Z intersected with [0, 2 pi]`.
    Lattice,
    /// `count` points linearly spaced over `[0, 2 pi]`, endpoints included.
    Linear(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    /// Factored form from the Galerkin eigenvalues.
    Factored,
    /// LU determinant of every section (slow; for verification).
    Lu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchSquares {
    /// Unit squares around these centers.
    Centers(Vec<[f64; 2]>),
    /// All unit squares around Gaussian integers meeting the window, with
    /// the output clipped to the window.
    Window([f64; 4]),
}

#[derive(Debug, Clone)]
pub struct SchrodingerAlgoParams {
    /// Plane-wave half-width `K`; the grid spacing is `1/K`.
    pub half_width: usize,
    /// Quadrature samples (practical mode).
    pub n: usize,
    pub threshold: Threshold,
    pub squares: SearchSquares,
    pub shifts: Vec<Complex64>,
    /// Points closer than this to a shift's free spectrum skip that shift.
    /// `None` picks half the minimal gap between the shifts' free spectra.
    pub delta_min: Option<f64>,
    pub theta_grid: ThetaGrid,
    /// Integrability exponent for the certified mode.
    pub p: f64,
    /// Sample cap for the parameterless mode.
    pub n_cap: usize,
    pub evaluation: Evaluation,
    /// Use exact Fourier coefficients when the potential provides them.
    pub exact_fourier: bool,
    pub scan: ScanOptions,
}

impl SchrodingerAlgoParams {
    pub fn practical(half_width: usize, n: usize, c: f64, squares: SearchSquares) -> Self {
        SchrodingerAlgoParams {
            half_width,
            n,
            threshold: Threshold::Value(c),
            squares,
            shifts: vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            delta_min: None,
            theta_grid: ThetaGrid::Lattice,
            p: 2.0,
            n_cap: 10_000,
            evaluation: Evaluation::Factored,
            exact_fourier: false,
            scan: ScanOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.half_width < 1 {
            return Err(invalid("K", "must be at least 1"));
        }
        if self.n < 1 {
            return Err(invalid("n", "must be at least 1"));
        }
        if let Threshold::Value(c) = self.threshold {
            if !(c > 0.0 && c.is_finite()) {
                return Err(invalid("C", format!("must be positive, got {c}")));
            }
        }
        if self.threshold == Threshold::Parameterless && self.half_width < 2 {
            return Err(invalid("K", "parameterless mode needs K >= 2"));
        }
        if self.shifts.is_empty() || self.shifts.len() > 32 {
            return Err(invalid("shifts", "need between 1 and 32 shifts"));
        }
        if !(self.p > 1.0) {
            return Err(invalid("p", "must exceed the dimension 1"));
        }
        if let ThetaGrid::Linear(0) = self.theta_grid {
            return Err(invalid("theta_grid", "need at least one quasi-momentum"));
        }
        match &self.squares {
            SearchSquares::Centers(c) => {
                let mut seen = std::collections::BTreeSet::new();
                for z in c {
                    if !(z[0].is_finite() && z[1].is_finite()) {
                        return Err(invalid("squares", "centers must be finite"));
                    }
                    if !seen.insert((z[0].to_bits(), z[1].to_bits())) {
                        return Err(invalid("squares", "centers must be pairwise distinct"));
                    }
                }
            }
            SearchSquares::Window(w) => {
                Window::new(w[0], w[1], w[2], w[3])?;
            }
        }
        Ok(())
    }
}

/// Half the smallest distance between the free spectra
/// `{shift + (2 pi q)^2}` of different shifts, up to `|z| <= reach`.
pub fn default_delta_min(shifts: &[Complex64], reach: f64) -> f64 {
    if shifts.len() < 2 {
        return 0.0;
    }
    let qmax = ((reach.max(0.0)).sqrt() / (2.0 * PI)).ceil() as i64 + 1;
    let levels: Vec<f64> = (0..=qmax).map(|q| (2.0 * PI * q as f64).powi(2)).collect();
    let mut best = f64::INFINITY;
    for (a, sa) in shifts.iter().enumerate() {
        for sb in &shifts[a + 1..] {
            for la in &levels {
                for lb in &levels {
                    best = best.min((sa + la - sb - lb).norm());
                }
            }
        }
    }
    best / 2.0
}

/// Distance from `z` to `{shift + (2 pi q)^2 : q >= 0}`.
pub fn free_spectrum_distance(z: Complex64, shift: Complex64) -> f64 {
    let w = z - shift;
    let q = w.re.max(0.0).sqrt() / (2.0 * PI);
    let center = q.round() as i64;
    (center - 1..=center + 1)
        .filter(|&m| m >= 0)
        .map(|m| (w - (2.0 * PI * m as f64).powi(2)).norm())
        .fold(f64::INFINITY, f64::min)
}

/// A real shift to the right of the window by one window width, so that no
/// pole `shift + k^2` of the section determinant falls inside it.
pub fn exterior_shift(w: &Window) -> Complex64 {
    let width = (w.re_max - w.re_min).max(1.0);
    Complex64::new(w.re_max.max(0.0) + width, 0.0)
}

/// Centers of the unit squares meeting the window, ordered by `|Z|`.
pub fn squares_for_window(w: &Window) -> Vec<Complex64> {
    let re = ((w.re_min - 0.5).ceil() as i64)..=((w.re_max + 0.5).floor() as i64);
    let im = ((w.im_min - 0.5).ceil() as i64)..=((w.im_max + 0.5).floor() as i64);
    let mut out: Vec<(i64, i64)> = re.flat_map(|a| im.clone().map(move |b| (a, b))).collect();
    out.sort_by_key(|&(a, b)| (a * a + b * b, a, b));
    out.into_iter()
        .map(|(a, b)| Complex64::new(a as f64, b as f64))
        .collect()
}

fn square_rect(center: Complex64, k: f64) -> LatticeRect {
    LatticeRect {
        i0: ((center.re - 0.5) * k).ceil() as i64,
        i1: ((center.re + 0.5) * k).floor() as i64,
        j0: ((center.im - 0.5) * k).ceil() as i64,
        j1: ((center.im + 0.5) * k).floor() as i64,
    }
}

struct Exclusion {
    h: f64,
    shift: Complex64,
    delta_min: f64,
}

impl Region for Exclusion {
    fn may_intersect(&self, _: &LatticeRect) -> bool {
        true
    }

    fn contains(&self, i: i64, j: i64) -> bool {
        let z = Complex64::new(i as f64 * self.h, j as f64 * self.h);
        let d = free_spectrum_distance(z, self.shift);
        d >= self.delta_min && d > 1e-12 * (1.0 + z.norm())
    }
}

/// Parameters after resolving the threshold mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub n: usize,
    pub tau: f64,
    /// Order of the determinant (1 = plain).
    pub det_order: usize,
    pub certified: bool,
    pub cap_binding: bool,
    pub theta_grid: ThetaGrid,
}

pub fn resolve(params: &SchrodingerAlgoParams) -> Result<Resolved> {
    params.validate()?;
    let k = params.half_width as f64;
    Ok(match params.threshold {
        Threshold::Value(c) => Resolved {
            n: params.n,
            tau: c,
            det_order: 1,
            certified: false,
            cap_binding: false,
            theta_grid: params.theta_grid,
        },
        Threshold::Certified => {
            let alpha = coupling_exponent(params.p)?.ceil();
            let n = k.powf(alpha);
            if n > 1e8 {
                return Err(invalid(
                    "K",
                    format!("certified coupling needs n = K^{alpha} = {n:e} samples"),
                ));
            }
            Resolved {
                n: n as usize,
                tau: k.powf(-(0.5 - 0.5 / params.p)),
                det_order: params.p.ceil() as usize,
                certified: true,
                cap_binding: false,
                theta_grid: ThetaGrid::Linear(params.half_width),
            }
        }
        Threshold::Parameterless => {
            let wanted = k.exp().ceil();
            let cap_binding = wanted > params.n_cap as f64;
            Resolved {
                n: if cap_binding { params.n_cap } else { wanted as usize },
                tau: 1.0 / k.ln(),
                det_order: 1,
                certified: false,
                cap_binding,
                theta_grid: params.theta_grid,
            }
        }
    })
}

pub fn thetas(grid: ThetaGrid, half_width: usize) -> Vec<f64> {
    match grid {
        ThetaGrid::Lattice => {
            let k = half_width as f64;
            let count = (2.0 * PI * k).floor() as usize;
            (0..=count).map(|i| i as f64 / k).collect()
        }
        ThetaGrid::Linear(count) => theta_grid(count),
    }
}

fn fourier_for(v: &PeriodicPotential, params: &SchrodingerAlgoParams, n: usize) -> Result<FourierTruncation> {
    let max_q = 2 * params.half_width;
    if params.exact_fourier {
        FourierTruncation::exact(v, max_q)
    } else {
        FourierTruncation::from_quadrature(v, max_q, n)
    }
}

/// Scan over `rects` for the given shifts; returns lattice indices with the
/// bit mask of the shifts that accepted them.
fn scan_lattice(
    f: &FourierTruncation,
    params: &SchrodingerAlgoParams,
    resolved: &Resolved,
    rects: &[LatticeRect],
    shifts: &[(usize, Complex64)],
    delta_min: f64,
) -> Result<BTreeMap<(i64, i64), u32>> {
    let k = params.half_width;
    let h = 1.0 / k as f64;
    let modes = ModeIndexing::new(k);
    let log_tau = resolved.tau.ln();
    let use_model = resolved.det_order == 1 && params.evaluation == Evaluation::Factored;

    let per_theta: Vec<Vec<((i64, i64), u32)>> = thetas(resolved.theta_grid, k)
        .into_par_iter()
        .map(|theta| -> Result<Vec<((i64, i64), u32)>> {
            let g = galerkin_matrix(f, theta, k)?;
            let roots = linalg::eigenvalues(&g)?;
            let g_norm = linalg::max_abs(&g) * g.nrows() as f64;
            let mut hits = Vec::new();
            for &(bit, shift) in shifts {
                let model = FactoredModulus {
                    roots: roots.clone(),
                    poles: modes.ks().map(|kj| shift + kj * kj).collect(),
                    slack: if use_model { 0.0 } else { 1e-9 * (1.0 + g_norm) },
                };
                let region = Exclusion { h, shift, delta_min };
                let options = if resolved.det_order == 1 {
                    params.scan
                } else {
                    ScanOptions {
                        exhaustive: true,
                        ..params.scan
                    }
                };
                let mut found = Vec::new();
                let mut failure = None;
                for rect in rects {
                    threshold_scan(
                        *rect,
                        h,
                        &model,
                        log_tau,
                        &region,
                        options,
                        |i, j| {
                            let z = Complex64::new(i as f64 * h, j as f64 * h);
                            if use_model {
                                return model.log_abs(z) <= log_tau;
                            }
                            let value =
                                build_bs_section(f, z, theta, k, shift).and_then(|s| s.reg_det(resolved.det_order));
                            match value {
                                Ok(d) => d.norm() <= resolved.tau,
                                Err(e) => {
                                    failure.get_or_insert(e);
                                    false
                                }
                            }
                        },
                        &mut found,
                    );
                }
                if let Some(e) = failure {
                    return Err(e);
                }
                hits.extend(found.into_iter().map(|ij| (ij, 1u32 << bit)));
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;

    let mut merged: BTreeMap<(i64, i64), u32> = BTreeMap::new();
    for (ij, bit) in per_theta.into_iter().flatten() {
        *merged.entry(ij).or_insert(0) |= bit;
    }
    Ok(merged)
}

fn finish_cloud(
    merged: BTreeMap<(i64, i64), u32>,
    params: &SchrodingerAlgoParams,
    resolved: &Resolved,
    v: &PeriodicPotential,
    clip: Option<Window>,
) -> SpectralCloud {
    let k = params.half_width as f64;
    let mut cloud = SpectralCloud {
        grid_spacing: 1.0 / k,
        ..Default::default()
    };
    for ((i, j), mask) in merged {
        let z = Complex64::new(i as f64 / k, j as f64 / k);
        if clip.is_none_or(|w| w.contains(z)) {
            cloud.points.push(z);
            cloud.shift_mask.push(mask);
        }
    }
    let md = &mut cloud.metadata;
    md.insert("algorithm".into(), "birman_schwinger".into());
    md.insert("potential".into(), v.describe());
    md.insert("K".into(), params.half_width.to_string());
    md.insert("n".into(), resolved.n.to_string());
    md.insert("threshold".into(), format!("{}", resolved.tau));
    md.insert("det_order".into(), resolved.det_order.to_string());
    md.insert(
        "shifts".into(),
        params
            .shifts
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(";"),
    );
    let mode = match params.threshold {
        Threshold::Value(_) => "practical",
        Threshold::Certified => "certified",
        Threshold::Parameterless => "parameterless",
    };
    md.insert("mode".into(), mode.into());
    if resolved.cap_binding {
        md.insert("coverage".into(), "uncertified: sample cap binds".into());
    }
    cloud
}

/// One square and one shift.
pub fn provisional_gamma(
    v: &PeriodicPotential,
    params: &SchrodingerAlgoParams,
    square_center: Complex64,
    shift: Complex64,
) -> Result<SpectralCloud> {
    let resolved = resolve(params)?;
    let f = fourier_for(v, params, resolved.n)?;
    let k = params.half_width as f64;
    let rect = square_rect(square_center, k);
    let delta_min = params.delta_min.unwrap_or(0.0);
    let merged = scan_lattice(&f, params, &resolved, &[rect], &[(0, shift)], delta_min)?;
    let single = SchrodingerAlgoParams {
        shifts: vec![shift],
        ..params.clone()
    };
    Ok(finish_cloud(merged, &single, &resolved, v, None))
}

/// Union over the squares and all shifts.
pub fn main_gamma(v: &PeriodicPotential, params: &SchrodingerAlgoParams) -> Result<SpectralCloud> {
    let resolved = resolve(params)?;
    let f = fourier_for(v, params, resolved.n)?;
    let k = params.half_width as f64;
    let (rects, clip, reach) = match &params.squares {
        SearchSquares::Window(w) => {
            let win = Window::new(w[0], w[1], w[2], w[3])?;
            let rect = LatticeRect::covering(win.re_min, win.re_max, win.im_min, win.im_max, 1.0 / k);
            let reach = w.iter().map(|x| x.abs()).fold(0.0, f64::max) * 2.0;
            (vec![rect], Some(win), reach)
        }
        SearchSquares::Centers(c) => {
            let rects: Vec<LatticeRect> = c.iter().map(|z| square_rect(Complex64::new(z[0], z[1]), k)).collect();
            let reach = c.iter().map(|z| z[0].abs() + z[1].abs() + 1.0).fold(0.0, f64::max) * 2.0;
            (rects, None, reach)
        }
    };
    let delta_min = params
        .delta_min
        .unwrap_or_else(|| default_delta_min(&params.shifts, reach));
    let shifts: Vec<(usize, Complex64)> = params.shifts.iter().copied().enumerate().collect();
    let merged = scan_lattice(&f, params, &resolved, &rects, &shifts, delta_min)?;
    let mut cloud = finish_cloud(merged, params, &resolved, v, clip);
    cloud.metadata.insert("delta_min".into(), delta_min.to_string());
    Ok(cloud)
}

/// Main algorithm with threshold `1/log K` and `n = min(ceil(e^K), n_cap)`.
pub fn parameterless_gamma(
    v: &PeriodicPotential,
    half_width: usize,
    n_cap: usize,
    squares: SearchSquares,
) -> Result<SpectralCloud> {
    let mut params = SchrodingerAlgoParams::practical(half_width, 1, 1.0, squares);
    params.threshold = Threshold::Parameterless;
    params.n_cap = n_cap;
    main_gamma(v, &params)
}
