use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use spectra_core::metrics::{attouch_wets_with, hausdorff, PointSet, SupMethod, DEFAULT_N_MAX};
use spectra_core::oracles::fd::truncated_fd_spectrum_with;
use spectra_core::oracles::hill::{discriminant_neighbourhood, discriminant_spectrum, real_gaps, window_grid};
use spectra_core::periodic_matrix::{gamma_n_matrix_with, BandedPeriodicOperator, MatrixScanConfig};
use spectra_core::schrodinger::{
    exterior_shift, main_gamma, Evaluation, SchrodingerAlgoParams, SearchSquares, ThetaGrid,
};
use spectra_core::tower::tower_gamma;
use spectra_core::{SpectralCloud, Window};

use crate::error::{CliError, CliResult};
use crate::output::{read_text, PlotBox};
use crate::parse;

/// What a command hands back for the manifest.
pub struct Report {
    pub inputs: Value,
    pub summary: Value,
}

fn cloud_summary(cloud: &SpectralCloud) -> Value {
    json!({
        "points": cloud.len(),
        "grid_spacing": cloud.grid_spacing,
        "certificate": cloud.certificate,
        "metadata": cloud.metadata,
    })
}

fn plot_for(window: Option<[f64; 4]>, cloud: &SpectralCloud) -> PlotBox {
    match window {
        Some(w) => PlotBox {
            re: (w[0], w[1]),
            im: (w[2], w[3]),
        },
        None => PlotBox::around(&cloud.points),
    }
}

fn load_points(path: &Path) -> CliResult<PointSet> {
    let cloud = SpectralCloud::from_csv(&read_text(path)?)?;
    PointSet::new(cloud.points).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

// matrix

#[derive(Debug, Args, Serialize)]
pub struct MatrixArgs {
    /// Operator as JSON: {"period", "bandwidth", "diagonals"}.
    #[arg(long)]
    pub input: PathBuf,
    /// Resolution index: lattice spacing 1/n, n quasi-momenta, threshold n^(-1/2).
    #[arg(long)]
    pub n: usize,
    /// Refuse scans with more lattice points times quasi-momenta than this.
    #[arg(long, default_value_t = 1e12)]
    pub point_budget: f64,
    /// Evaluate every lattice point instead of pruning.
    #[arg(long)]
    pub exhaustive: bool,
}

pub fn matrix(a: &MatrixArgs, run: &mut crate::output::Run, svg: bool) -> CliResult<Report> {
    let op = BandedPeriodicOperator::from_json(&read_text(&a.input)?)?;
    let mut config = MatrixScanConfig {
        point_budget: a.point_budget,
        ..Default::default()
    };
    config.scan.exhaustive = a.exhaustive;
    let cloud = gamma_n_matrix_with(&op, a.n, &config)?;
    let plot = svg.then(|| plot_for(None, &cloud));
    run.write_cloud("cloud", &cloud, plot.as_ref())?;
    run.write_json("certificate.json", &cloud_summary(&cloud))?;
    Ok(Report {
        inputs: json!({ "args": a, "operator": serde_json::from_str::<Value>(&op.to_json()).unwrap_or(Value::Null) }),
        summary: cloud_summary(&cloud),
    })
}

// schrodinger

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMode {
    /// Shifts 1 and 2, the two decompositions of the convergence proof.
    Both,
    One,
    Two,
    /// One real shift a window width to the right of the window.
    Exterior,
}

/// Threshold as written in a config: a number or a mode name.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThresholdField {
    Value(f64),
    Mode(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SquaresField {
    Centers(Vec<[f64; 2]>),
    Window { window: [f64; 4] },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaField {
    Count(usize),
    Named(String),
}

/// The `schrodinger` run configuration; also what the flags build.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodingerConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    /// Mathieu amplitude, as an alternative to `potential`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(rename = "K")]
    pub k: usize,
    pub n: usize,
    #[serde(rename = "C")]
    pub c: ThresholdField,
    pub squares: SquaresField,
    #[serde(default = "default_shift_mode")]
    pub shift_mode: ShiftMode,
    /// Explicit shifts as `[re, im]`; override `shift_mode`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<ThetaField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<String>,
    #[serde(default)]
    pub exact_fourier: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_min: Option<f64>,
}

fn default_shift_mode() -> ShiftMode {
    ShiftMode::Both
}

#[derive(Debug, Args, Serialize)]
pub struct SchrodingerArgs {
    /// JSON run configuration; other flags are then not allowed.
    #[arg(long, conflicts_with_all = ["potential", "mu", "k", "n", "c", "window", "square"])]
    pub config: Option<PathBuf>,
    /// Potential expression in x on [0, 1), e.g. "10*cos(2*pi*x)".
    #[arg(long)]
    pub potential: Option<String>,
    /// Mathieu amplitude: V = mu cos(2 pi x) with exact coefficients.
    #[arg(long)]
    pub mu: Option<String>,
    /// Singular point of the potential.
    #[arg(long)]
    pub x0: Option<f64>,
    /// Plane-wave half-width; the grid spacing is 1/K.
    #[arg(long = "K", id = "k")]
    pub k: Option<usize>,
    /// Quadrature samples.
    #[arg(long)]
    pub n: Option<usize>,
    /// Threshold: a number, `certified` or `parameterless`.
    #[arg(long = "C", id = "c")]
    pub c: Option<String>,
    /// re_min,re_max,im_min,im_max
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Unit-square center re,im (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    pub square: Vec<String>,
    #[arg(long, value_enum, default_value_t = ShiftMode::Both)]
    pub shift_mode: ShiftMode,
    /// Explicit spectral shift (repeatable, complex constant); overrides --shift-mode.
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Vec<String>,
    /// `lattice` for (1/K)Z in [0, 2 pi], or a count of linearly spaced points.
    #[arg(long)]
    pub theta_grid: Option<String>,
    /// `factored` or `lu`.
    #[arg(long)]
    pub evaluation: Option<String>,
    #[arg(long)]
    pub exact_fourier: bool,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n_cap: Option<usize>,
    #[arg(long)]
    pub delta_min: Option<f64>,
}

impl SchrodingerArgs {
    fn to_config(&self) -> CliResult<SchrodingerConfig> {
        if let Some(path) = &self.config {
            let text = read_text(path)?;
            return serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())));
        }
        let need = |name: &str| CliError::config(format!("--{name} is required"));
        let squares = match (&self.window, self.square.is_empty()) {
            (Some(w), true) => SquaresField::Window {
                window: parse::window(w)?,
            },
            (None, false) => {
                SquaresField::Centers(self.square.iter().map(|s| parse::point(s)).collect::<CliResult<_>>()?)
            }
            _ => return Err(CliError::config("give either --window or at least one --square")),
        };
        let c = match parse::threshold(self.c.as_deref().ok_or_else(|| need("C"))?)? {
            spectra_core::schrodinger::Threshold::Value(v) => ThresholdField::Value(v),
            _ => ThresholdField::Mode(self.c.clone().unwrap_or_default()),
        };
        let shifts = if self.shift.is_empty() {
            None
        } else {
            Some(
                self.shift
                    .iter()
                    .map(|s| parse::complex(s).map(|z| [z.re, z.im]))
                    .collect::<CliResult<_>>()?,
            )
        };
        Ok(SchrodingerConfig {
            potential: self.potential.clone(),
            mu: self.mu.clone(),
            x0: self.x0,
            k: self.k.ok_or_else(|| need("K"))?,
            n: self.n.ok_or_else(|| need("n"))?,
            c,
            squares,
            shift_mode: self.shift_mode,
            shifts,
            theta_grid: self.theta_grid.as_ref().map(|t| match t.parse::<usize>() {
                Ok(count) => ThetaField::Count(count),
                Err(_) => ThetaField::Named(t.clone()),
            }),
            evaluation: self.evaluation.clone(),
            exact_fourier: self.exact_fourier,
            p: self.p,
            n_cap: self.n_cap,
            delta_min: self.delta_min,
        })
    }
}

fn shifts_for(mode: ShiftMode, explicit: &Option<Vec<[f64; 2]>>, squares: &SquaresField) -> CliResult<Vec<Complex64>> {
    if let Some(list) = explicit {
        return Ok(list.iter().map(|s| Complex64::new(s[0], s[1])).collect());
    }
    let real = |v: f64| vec![Complex64::new(v, 0.0)];
    Ok(match mode {
        ShiftMode::Both => vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
        ShiftMode::One => real(1.0),
        ShiftMode::Two => real(2.0),
        ShiftMode::Exterior => {
            let (lo, hi, ilo, ihi) = match squares {
                SquaresField::Window { window: w } => (w[0], w[1], w[2], w[3]),
                SquaresField::Centers(c) => {
                    let f = |g: fn(&[f64; 2]) -> f64, pick: fn(f64, f64) -> f64, init: f64| {
                        c.iter().map(g).fold(init, pick)
                    };
                    (
                        f(|z| z[0], f64::min, f64::INFINITY) - 0.5,
                        f(|z| z[0], f64::max, f64::NEG_INFINITY) + 0.5,
                        f(|z| z[1], f64::min, f64::INFINITY) - 0.5,
                        f(|z| z[1], f64::max, f64::NEG_INFINITY) + 0.5,
                    )
                }
            };
            vec![exterior_shift(&Window::new(lo, hi, ilo, ihi)?)]
        }
    })
}

/// Validated algorithm parameters for a configuration.
pub fn schrodinger_params(cfg: &SchrodingerConfig) -> CliResult<SchrodingerAlgoParams> {
    let squares = match &cfg.squares {
        SquaresField::Window { window } => {
            Window::new(window[0], window[1], window[2], window[3])?;
            SearchSquares::Window(*window)
        }
        SquaresField::Centers(c) => SearchSquares::Centers(c.clone()),
    };
    let threshold = match &cfg.c {
        ThresholdField::Value(v) => parse::threshold(&v.to_string())?,
        ThresholdField::Mode(m) => parse::threshold(m)?,
    };
    let mut p = SchrodingerAlgoParams::practical(cfg.k, cfg.n, 1.0, squares);
    p.threshold = threshold;
    p.shifts = shifts_for(cfg.shift_mode, &cfg.shifts, &cfg.squares)?;
    if let Some(t) = &cfg.theta_grid {
        p.theta_grid = match t {
            ThetaField::Count(count) => ThetaGrid::Linear(*count),
            ThetaField::Named(name) if name == "lattice" => ThetaGrid::Lattice,
            ThetaField::Named(name) => {
                return Err(CliError::config(format!(
                    "theta grid `{name}`: use `lattice` or a count"
                )))
            }
        };
    }
    if let Some(e) = &cfg.evaluation {
        p.evaluation = match e.as_str() {
            "factored" => Evaluation::Factored,
            "lu" => Evaluation::Lu,
            other => {
                return Err(CliError::config(format!(
                    "evaluation `{other}`: use `factored` or `lu`"
                )))
            }
        };
    }
    p.exact_fourier = cfg.exact_fourier;
    if let Some(v) = cfg.p {
        p.p = v;
    }
    if let Some(v) = cfg.n_cap {
        p.n_cap = v;
    }
    p.delta_min = cfg.delta_min;
    p.validate()?;
    Ok(p)
}

fn config_window(cfg: &SchrodingerConfig) -> Option<[f64; 4]> {
    match cfg.squares {
        SquaresField::Window { window } => Some(window),
        SquaresField::Centers(_) => None,
    }
}

pub fn schrodinger(a: &SchrodingerArgs, run: &mut crate::output::Run, svg: bool) -> CliResult<Report> {
    let cfg = a.to_config()?;
    let params = schrodinger_params(&cfg)?;
    let v = parse::potential(cfg.potential.as_deref(), cfg.mu.as_deref(), cfg.x0)?;
    let cloud = main_gamma(&v, &params)?;
    let plot = svg.then(|| plot_for(config_window(&cfg), &cloud));
    run.write_cloud("cloud", &cloud, plot.as_ref())?;
    run.write_json("certificate.json", &cloud_summary(&cloud))?;
    Ok(Report {
        inputs: json!({ "config": cfg, "shifts": params.shifts.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>() }),
        summary: cloud_summary(&cloud),
    })
}

// tower

#[derive(Debug, Args, Serialize)]
pub struct TowerArgs {
    #[arg(long)]
    pub potential: String,
    /// Singular point of the potential; the cutoff plateau is centred there.
    #[arg(long)]
    pub x0: Option<f64>,
    /// Outer index: plane-wave half-width of the inner algorithm.
    #[arg(long)]
    pub m: usize,
    /// Inner indices (cutoff sharpness), comma separated.
    #[arg(long, default_value = "8,16,32,64")]
    pub n_sweep: String,
    #[arg(long = "C", id = "c", default_value_t = 1e-4)]
    pub c: f64,
    /// Quadrature samples of the inner algorithm.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long, allow_hyphen_values = true, default_value = "-5,30,-2,2")]
    pub window: String,
    #[arg(long, value_enum, default_value_t = ShiftMode::Exterior)]
    pub shift_mode: ShiftMode,
}

pub fn tower(a: &TowerArgs, run: &mut crate::output::Run, svg: bool) -> CliResult<Report> {
    let window = parse::window(&a.window)?;
    let sweep = parse::counts(&a.n_sweep)?;
    if sweep.is_empty() {
        return Err(CliError::config("--n-sweep needs at least one value"));
    }
    let v = parse::potential(Some(&a.potential), None, a.x0)?;
    let mut params = SchrodingerAlgoParams::practical(a.m, a.samples, a.c, SearchSquares::Window(window));
    params.shifts = shifts_for(a.shift_mode, &None, &SquaresField::Window { window })?;
    params.validate()?;
    let mut clouds = Vec::with_capacity(sweep.len());
    for &n in &sweep {
        let cloud = tower_gamma(&v, a.m, n, &params)?;
        let plot = svg.then(|| plot_for(Some(window), &cloud));
        run.write_cloud(&format!("cloud_n{n}"), &cloud, plot.as_ref())?;
        clouds.push(cloud);
    }
    let mut trace = String::from("n,d_aw_to_previous\n");
    let mut values = Vec::new();
    for (i, &n) in sweep.iter().enumerate() {
        let d = if i == 0 {
            None
        } else {
            match (
                PointSet::new(clouds[i - 1].points.clone()),
                PointSet::new(clouds[i].points.clone()),
            ) {
                (Ok(p), Ok(q)) => Some(attouch_wets_with(&p, &q, DEFAULT_N_MAX, SupMethod::Candidates)?),
                _ => None,
            }
        };
        trace.push_str(&format!("{n},{}\n", d.map_or(String::new(), |x| x.to_string())));
        values.push(json!({ "n": n, "points": clouds[i].len(), "d_aw_to_previous": d }));
    }
    run.write("trace.csv", &trace)?;
    Ok(Report {
        inputs: json!({ "args": a }),
        summary: json!({ "trace": values }),
    })
}

// discriminant

#[derive(Debug, Args, Serialize)]
pub struct DiscriminantArgs {
    /// Mathieu amplitude (complex constant).
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value = "0,45,-6,6")]
    pub window: String,
    #[arg(long, default_value_t = 0.05)]
    pub spacing: f64,
    /// Softening: keep points with dist(D, [-1, 1]) <= tau.
    #[arg(long, default_value_t = 0.05)]
    pub tau: f64,
    /// Use the first-order distance test dist(D, [-1, 1]) / |D'| <= radius instead of tau.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Integration steps per period.
    #[arg(long, default_value_t = 512)]
    pub steps: usize,
}

pub fn discriminant(a: &DiscriminantArgs, run: &mut crate::output::Run, svg: bool) -> CliResult<Report> {
    let v = parse::potential(a.potential.as_deref(), a.mu.as_deref(), None)?;
    let w = parse::window(&a.window)?;
    let grid = window_grid((w[0], w[1]), (w[2], w[3]), a.spacing)?;
    let cloud = match a.radius {
        Some(r) => discriminant_neighbourhood(&v, &grid, r, a.steps)?,
        None => discriminant_spectrum(&v, &grid, a.tau, a.steps)?,
    };
    let plot = svg.then(|| plot_for(Some(w), &cloud));
    run.write_cloud("discriminant", &cloud, plot.as_ref())?;
    Ok(Report {
        inputs: json!({ "args": a }),
        summary: json!({ "grid_points": grid.len(), "points": cloud.len(), "metadata": cloud.metadata }),
    })
}

// pollution

#[derive(Debug, Args, Serialize)]
pub struct PollutionArgs {
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub potential: Option<String>,
    /// Truncated domain [-L, L].
    #[arg(long, default_value_t = 100.7)]
    pub half_width: f64,
    #[arg(long, default_value_t = 0.05)]
    pub h: f64,
    #[arg(long, default_value_t = 20_000)]
    pub max_dim: usize,
    /// Real range in which discriminant gaps are located and eigenvalues
    /// inside them reported.
    #[arg(long, allow_hyphen_values = true, default_value = "0,45")]
    pub gap_range: String,
    #[arg(long, default_value_t = 512)]
    pub steps: usize,
}

pub fn pollution(a: &PollutionArgs, run: &mut crate::output::Run) -> CliResult<Report> {
    let v = parse::potential(a.potential.as_deref(), a.mu.as_deref(), None)?;
    let range = parse::reals(&a.gap_range)?;
    let [lo, hi]: [f64; 2] = range
        .try_into()
        .map_err(|_| CliError::config("--gap-range needs two numbers lo,hi"))?;
    let eig = truncated_fd_spectrum_with(&v, a.half_width, a.h, a.max_dim)?;
    let mut csv = String::from("lambda\n");
    for l in &eig {
        csv.push_str(&format!("{l}\n"));
    }
    run.write("eigenvalues.csv", &csv)?;
    let samples = (((hi - lo) * 20.0).ceil() as usize).max(2) + 1;
    let gaps = real_gaps(&v, lo, hi, samples, a.steps)?;
    let in_gaps: Vec<Value> = gaps
        .iter()
        .map(|&(g0, g1)| {
            let inside: Vec<f64> = eig.iter().copied().filter(|&l| g0 < l && l < g1).collect();
            json!({ "gap": [g0, g1], "eigenvalues": inside })
        })
        .collect();
    Ok(Report {
        inputs: json!({ "args": a }),
        summary: json!({ "eigenvalues": eig.len(), "gaps": in_gaps }),
    })
}

// metrics and compare

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Hausdorff,
    Aw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupArg {
    Candidates,
    Sampling,
}

impl From<SupArg> for SupMethod {
    fn from(s: SupArg) -> Self {
        match s {
            SupArg::Candidates => SupMethod::Candidates,
            SupArg::Sampling => SupMethod::Sampling,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct MetricsArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum, default_value_t = Metric::Hausdorff)]
    pub metric: Metric,
    /// Terms of the Attouch-Wets series.
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: u32,
    #[arg(long, value_enum, default_value_t = SupArg::Candidates)]
    pub sup: SupArg,
}

pub fn metrics(a: &MetricsArgs, run: &mut crate::output::Run) -> CliResult<(Report, Value)> {
    let (p, q) = (load_points(&a.a)?, load_points(&a.b)?);
    let value = match a.metric {
        Metric::Hausdorff => hausdorff(&p, &q),
        Metric::Aw => attouch_wets_with(&p, &q, a.n_max, a.sup.into())?,
    };
    let result = json!({
        "metric": a.metric,
        "value": value,
        "points_a": p.points().len(),
        "points_b": q.points().len(),
    });
    run.write_json("metrics.json", &result)?;
    Ok((
        Report {
            inputs: json!({ "args": a }),
            summary: result.clone(),
        },
        result,
    ))
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: u32,
}

pub fn compare(a: &CompareArgs, run: &mut crate::output::Run) -> CliResult<(Report, Value)> {
    let (p, q) = (load_points(&a.a)?, load_points(&a.b)?);
    let result = json!({
        "hausdorff": hausdorff(&p, &q),
        "attouch_wets": attouch_wets_with(&p, &q, a.n_max, SupMethod::Candidates)?,
        "attouch_wets_tail_bound": 0.5f64.powi(a.n_max as i32),
        "points_a": p.points().len(),
        "points_b": q.points().len(),
    });
    run.write_json("compare.json", &result)?;
    Ok((
        Report {
            inputs: json!({ "args": a }),
            summary: result.clone(),
        },
        result,
    ))
}
