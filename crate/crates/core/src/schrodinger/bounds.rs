//! Closed-form constants for the Schrodinger algorithms (dimension one).

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SpectraError};

fn need_above_one(name: &'static str, v: f64) -> Result<()> {
    if v > 1.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            name,
            format!("must be finite and exceed the dimension 1, got {v}"),
        ))
    }
}

fn need_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

fn need_nonnegative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be non-negative and finite, got {v}")))
    }
}

/// Default number of modes scanned directly by [`c_lambda`].
pub const DEFAULT_TAIL: usize = 64;

/// `sup_j |k_j|^2 / ||k_j|^2 - (z - shift)|` over `k_j in 2 pi Z`, the
/// `k = 0` term taken as 0.
///
/// With `w = z - shift` and `t = k^2`, the ratio squared is
/// `t^2 / ((t - Re w)^2 + Im w^2)`, whose derivative has the sign of
/// `|w|^2 - t Re w`. For `Re w <= 0` it increases to its limit 1; otherwise
/// it peaks at `t = |w|^2 / Re w` and decays to 1. So the sup is the max of
/// 1, the modes adjacent to the peak, and the directly scanned modes.
pub fn c_lambda(z: Complex64, shift: Complex64, tail: usize) -> Result<f64> {
    let w = z - shift;
    if w == Complex64::new(0.0, 0.0) {
        return Ok(1.0);
    }
    let ratio = |q: u64| -> Result<f64> {
        let t = (2.0 * PI * q as f64).powi(2);
        let d = (Complex64::new(t, 0.0) - w).norm();
        if d <= 1e-14 * t {
            return Err(SpectraError::FreeSpectrumCollision {
                z,
                shift,
                mode: q as i64,
            });
        }
        Ok(t / d)
    };
    let mut best: f64 = 1.0;
    for q in 1..=tail as u64 {
        best = best.max(ratio(q)?);
    }
    if w.re > 0.0 {
        let peak = w.norm_sqr() / w.re;
        let q = peak.sqrt() / (2.0 * PI);
        for cand in [q.floor(), q.ceil()] {
            if cand >= 1.0 && cand.is_finite() {
                best = best.max(ratio(cand as u64)?);
            }
        }
    }
    Ok(best)
}

/// `(2/pi)(|theta| + v_norm) C_lambda (1 - 1/s)^(-1/s)`, with
/// `v_norm >= sup ||theta|^2 - shift + V|`.
pub fn schatten_bound(s: f64, theta: f64, z: Complex64, shift: Complex64, v_norm: f64) -> Result<f64> {
    need_above_one("s", s)?;
    need_nonnegative("v_norm", v_norm)?;
    let cl = c_lambda(z, shift, DEFAULT_TAIL)?;
    Ok(schatten_bound_with(s, theta, v_norm, cl))
}

pub fn schatten_bound_with(s: f64, theta: f64, v_norm: f64, c_lambda: f64) -> f64 {
    2.0 / PI * (theta.abs() + v_norm) * c_lambda * (1.0 - 1.0 / s).powf(-1.0 / s)
}

/// Lipschitz constant of the sandwiched operator in `(z, theta)`:
/// `delta^-2 48 R^2 (s/(s-1)) ((3p-1)/(p-1)) (1 + |V|_{W^{1,p}})`.
pub fn lipschitz_bound_k(s: f64, delta: f64, r: f64, p: f64, sobolev_norm: f64) -> Result<f64> {
    need_above_one("s", s)?;
    need_above_one("p", p)?;
    need_positive("delta", delta)?;
    need_positive("R", r)?;
    need_nonnegative("sobolev_norm", sobolev_norm)?;
    Ok(48.0 * r * r / (delta * delta) * (s / (s - 1.0)) * ((3.0 * p - 1.0) / (p - 1.0)) * (1.0 + sobolev_norm))
}

/// Constants `C1, C2, C3` of the truncation error bound.
pub fn error_constants(s: f64, p: f64) -> (f64, f64, f64) {
    let c1 = 2.0 / (PI * (s - 1.0).powf(1.0 / s));
    let c2 = 2.0 / PI * (1.0 - 1.0 / s).powf(-1.0 / s) * 2.0 * (1.0 + PI) / (1.0 - 1.0 / p);
    let c3 = 4.0 / (PI * (s - 1.0).powf(1.0 / s));
    (c1, c2, c3)
}

#[derive(Debug, Clone, Copy)]
pub struct ErrorBoundInput {
    pub s: f64,
    pub p: f64,
    pub half_width: usize,
    pub n: usize,
    pub theta: f64,
    pub z: Complex64,
    pub shift: Complex64,
    pub sobolev_norm: f64,
    pub sup_norm: f64,
}

/// Schatten-`s` distance between the full operator and the quadrature
/// section with `N = 2K + 1` modes:
/// `C_l (C1 |theta| N^(1/s-1) + C2 N^2 n^-(1-1/p) |V|_{W^{1,p}}
///  + C3 N^(1/s-1) (||theta|^2 - shift| + |V|_inf))`.
pub fn main_error_bound(input: &ErrorBoundInput) -> Result<f64> {
    let ErrorBoundInput {
        s,
        p,
        half_width,
        n,
        theta,
        z,
        shift,
        sobolev_norm,
        sup_norm,
    } = *input;
    need_above_one("s", s)?;
    need_above_one("p", p)?;
    need_nonnegative("sobolev_norm", sobolev_norm)?;
    need_nonnegative("sup_norm", sup_norm)?;
    if n == 0 {
        return Err(invalid("n", "need at least one sample"));
    }
    let cl = c_lambda(z, shift, DEFAULT_TAIL)?;
    let (c1, c2, c3) = error_constants(s, p);
    let modes = (2 * half_width + 1) as f64;
    let decay = modes.powf(1.0 / s - 1.0);
    let quad = modes * modes * (n as f64).powf(-(1.0 - 1.0 / p));
    let shifted = (Complex64::new(theta * theta, 0.0) - shift).norm();
    Ok(cl * (c1 * theta.abs() * decay + c2 * quad * sobolev_norm + c3 * decay * (shifted + sup_norm)))
}

/// `2 n^(-1+1/p) / (1 - 1/p) (1 + |k|) |V|_{W^{1,p}}` for the mode `k`.
pub fn quadrature_error_bound(p: f64, sobolev_norm: f64, k: f64, n: usize) -> Result<f64> {
    need_above_one("p", p)?;
    need_nonnegative("sobolev_norm", sobolev_norm)?;
    if n == 0 {
        return Err(invalid("n", "need at least one sample"));
    }
    Ok(2.0 * (n as f64).powf(-1.0 + 1.0 / p) / (1.0 - 1.0 / p) * (1.0 + k.abs()) * sobolev_norm)
}

/// Exponent of the certified coupling `n = N^ceil(alpha)`, chosen so that
/// `N^2 / n^(1-1/p) <= N^(1/p-1)`.
pub fn coupling_exponent(p: f64) -> Result<f64> {
    need_above_one("p", p)?;
    Ok((1.0 + 2.0 - 1.0 / p) / (1.0 - 1.0 / p))
}

/// Constants behind the coverage threshold of the certified algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pi1Certificate {
    pub delta: f64,
    pub z0: [f64; 2],
    pub p: f64,
    pub sobolev_norm: f64,
    /// `ceil(p)`, the order of the regularized determinant.
    pub det_order: u32,
    /// `e (2 + log m)`.
    pub c_m: f64,
    /// `(|z0| + 1) / delta`, the bound used for `C_lambda` on the square.
    pub c_lambda_bound: f64,
    pub schatten: f64,
    pub error: f64,
    /// `ln c_exp` with `c_exp = exp(c_m (1 + 2 S + E))`.
    pub log_c_exp: f64,
    pub log10_c_lip: f64,
    pub log10_g: f64,
    /// `log10` of `[C_Lip + G (|z0|+1)/delta]^(2/(1/p + 1))`.
    pub log10_n_required: f64,
    /// `log10` of the threshold re-derived from the final inequality of the
    /// convergence proof: `[2 C_Lip (1 + M) + G (|z0|+1)/delta]^(2/(1-1/p))`.
    pub log10_n_sufficient: f64,
    /// Radius `2^-k`, `k = ceil(log2(1/delta))`, of the covering superset.
    pub superset_inflation: f64,
}

impl Pi1Certificate {
    pub fn n_required(&self) -> f64 {
        10f64.powf(self.log10_n_required)
    }
}

fn log10_sum(a_ln: f64, b_ln: f64) -> f64 {
    let hi = a_ln.max(b_ln);
    let lo = a_ln.min(b_ln);
    let ln = if hi == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    };
    ln / std::f64::consts::LN_10
}

/// Certificate arithmetic for the square around `z0` at distance `delta`
/// from the free spectrum, for potentials with `|V|_{W^{1,p}} <= M`.
pub fn pi1_threshold(delta: f64, z0: Complex64, p: f64, m: f64) -> Result<Pi1Certificate> {
    need_positive("delta", delta)?;
    need_above_one("p", p)?;
    need_nonnegative("M", m)?;
    let s = p;
    let order = p.ceil();
    let c_m = E * (2.0 + order.ln());
    let cl = (z0.norm() + 1.0) / delta;
    let sup_v = (3.0 * p - 1.0) / (p - 1.0) * m;
    let w_norm = 4.0 * PI * PI - 1.0 + sup_v;
    let schatten = schatten_bound_with(s, 2.0 * PI, w_norm, cl);
    let (c1, c2, c3) = error_constants(s, p);
    let collected = c1 * 2.0 * PI + c2 * m + c3 * w_norm;
    let error = cl * collected;
    let log_c_exp = c_m * (1.0 + 2.0 * schatten + error);
    let ln_c_lip = log_c_exp - 2.0 * delta.ln()
        + (48.0 * (z0.norm() + 1.0).powi(2) * (s / (s - 1.0)) * ((3.0 * p - 1.0) / (p - 1.0))).ln();
    let ln_g = log_c_exp + collected.ln();
    let ln_g_term = ln_g + cl.ln();
    let base = log10_sum(ln_c_lip, ln_g_term);
    let log10_n_required = base * 2.0 / (1.0 / p + 1.0);
    let base_sufficient = log10_sum(ln_c_lip + (2.0 * (1.0 + m)).ln(), ln_g_term);
    let log10_n_sufficient = base_sufficient * 2.0 / (1.0 - 1.0 / p);
    let k = (1.0 / delta).log2().ceil().max(0.0);
    Ok(Pi1Certificate {
        delta,
        z0: [z0.re, z0.im],
        p,
        sobolev_norm: m,
        det_order: order as u32,
        c_m,
        c_lambda_bound: cl,
        schatten,
        error,
        log_c_exp,
        log10_c_lip: ln_c_lip / std::f64::consts::LN_10,
        log10_g: ln_g / std::f64::consts::LN_10,
        log10_n_required,
        log10_n_sufficient,
        superset_inflation: 2f64.powf(-k),
    })
}
