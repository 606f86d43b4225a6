use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde_json::{json, Value};
use spectra_core::SpectralCloud;

use crate::error::{CliError, CliResult};

/// Artifacts of one run, all under a single directory.
pub struct Run {
    pub dir: PathBuf,
    written: Vec<String>,
}

impl Run {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Run {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> CliResult<PathBuf> {
        let text = serde_json::to_string_pretty(value).expect("json values serialize");
        self.write(name, &(text + "\n"))
    }

    pub fn write_cloud(&mut self, stem: &str, cloud: &SpectralCloud, svg: Option<&PlotBox>) -> CliResult<()> {
        self.write(&format!("{stem}.csv"), &cloud.to_csv())?;
        if let Some(plot) = svg {
            self.write(&format!("{stem}.svg"), &scatter_svg(&cloud.points, plot, stem))?;
        }
        Ok(())
    }

    /// Writes `manifest.json`; the only artifact carrying wall-clock data.
    pub fn finish(mut self, command: &str, inputs: Value, elapsed: Duration, summary: Value) -> CliResult<()> {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut outputs = self.written.clone();
        outputs.push("manifest.json".into());
        let manifest = json!({
            "command": command,
            "inputs": inputs,
            "versions": {
                "spectra-cli": env!("CARGO_PKG_VERSION"),
            },
            "threads": rayon::current_num_threads(),
            "wall_time_seconds": elapsed.as_secs_f64(),
            "timestamp_unix": stamp,
            "summary": summary,
            "outputs": outputs,
        });
        self.write_json("manifest.json", &manifest)?;
        Ok(())
    }
}

/// Plot window in the complex plane.
#[derive(Debug, Clone, Copy)]
pub struct PlotBox {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl PlotBox {
    pub fn around(points: &[Complex64]) -> Self {
        if points.is_empty() {
            return PlotBox {
                re: (-1.0, 1.0),
                im: (-1.0, 1.0),
            };
        }
        let fold = |f: fn(&Complex64) -> f64| {
            points
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let pad = |(lo, hi): (f64, f64)| {
            let m = ((hi - lo) * 0.05).max(0.5);
            (lo - m, hi + m)
        };
        PlotBox {
            re: pad(fold(|z| z.re)),
            im: pad(fold(|z| z.im)),
        }
    }
}

/// One circle per point, with a frame and the axis ranges as labels.
pub fn scatter_svg(points: &[Complex64], b: &PlotBox, title: &str) -> String {
    let (w, h, m) = (800.0, 400.0, 50.0);
    let sx = |x: f64| m + (x - b.re.0) / (b.re.1 - b.re.0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - b.im.0) / (b.im.1 - b.im.0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    if b.im.0 < 0.0 && b.im.1 > 0.0 {
        let y0 = sy(0.0);
        let _ = writeln!(
            s,
            r#"<line x1="{m}" y1="{y0}" x2="{}" y2="{y0}" stroke="gray" stroke-dasharray="4"/>"#,
            w - m
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<text x="{m}" y="{}" font-size="12">Re {}</text>"#,
        h - m + 18.0,
        b.re.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#,
        w - m,
        h - m + 18.0,
        b.re.1
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="end">Im {}</text>"#,
        m - 4.0,
        h - m,
        b.im.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#,
        m - 4.0,
        m + 10.0,
        b.im.1
    );
    for z in points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="navy"/>"#,
            sx(z.re),
            sy(z.im)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}
