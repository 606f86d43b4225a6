use num_complex::Complex64;
use spectra_core::expr::Expr;
use spectra_core::potential::PeriodicPotential;
use spectra_core::schrodinger::Threshold;
use spectra_core::Window;

use crate::error::{CliError, CliResult};

/// A constant expression such as `10i`, `5+5i` or `2*pi`.
pub fn complex(text: &str) -> CliResult<Complex64> {
    let e = Expr::parse(text).map_err(|e| CliError::config(format!("`{text}`: {e}")))?;
    if !e.is_constant() {
        return Err(CliError::config(format!("`{text}` must be a constant")));
    }
    Ok(e.eval(0.0))
}

pub fn reals(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::config(format!("`{t}`: {e}")))
        })
        .collect()
}

pub fn counts(text: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| CliError::config(format!("`{t}`: {e}")))
        })
        .collect()
}

/// `re_min,re_max,im_min,im_max`.
pub fn window(text: &str) -> CliResult<[f64; 4]> {
    let v = reals(text)?;
    let w: [f64; 4] = v.try_into().map_err(|_| {
        CliError::config(format!(
            "window `{text}` needs four numbers re_min,re_max,im_min,im_max"
        ))
    })?;
    Window::new(w[0], w[1], w[2], w[3])?;
    Ok(w)
}

/// `re,im`.
pub fn point(text: &str) -> CliResult<[f64; 2]> {
    let v = reals(text)?;
    v.try_into()
        .map_err(|_| CliError::config(format!("square center `{text}` needs two numbers re,im")))
}

pub fn threshold(text: &str) -> CliResult<Threshold> {
    match text.trim() {
        "certified" => Ok(Threshold::Certified),
        "parameterless" => Ok(Threshold::Parameterless),
        t => t
            .parse::<f64>()
            .map(Threshold::Value)
            .map_err(|_| CliError::config(format!("C must be a number, `certified` or `parameterless`, got `{t}`"))),
    }
}

/// Potential from an expression, a Mathieu amplitude, and an optional
/// singular point.
pub fn potential(expression: Option<&str>, mu: Option<&str>, x0: Option<f64>) -> CliResult<PeriodicPotential> {
    match (expression, mu) {
        (Some(_), Some(_)) => Err(CliError::config("give either --potential or --mu, not both")),
        (None, None) => Err(CliError::config("a potential is required (--potential or --mu)")),
        (None, Some(m)) => {
            if x0.is_some() {
                return Err(CliError::config("--x0 needs an expression potential"));
            }
            Ok(PeriodicPotential::mathieu(complex(m)?))
        }
        (Some(e), None) => Ok(match x0 {
            Some(x) => PeriodicPotential::singular(e, x)?,
            None => PeriodicPotential::expression(e)?,
        }),
    }
}
