//! Threshold scans of `|f(z)| <= tau` over the lattice `h (Z + iZ)`.
//!
//! Both algorithms evaluate a function whose modulus factors as
//! `prod |z - r_i| / prod |z - p_j|` for a fixed quasi-momentum: a
//! characteristic polynomial (no poles) or a Birman-Schwinger determinant
//! (poles on the free spectrum). Over a lattice rectangle that modulus is
//! bounded below by the distances to the rectangle, so large empty regions
//! are discarded in one step. Surviving single points are handed to an exact
//! per-point test, so pruning never changes the result as long as the
//! factored bound is valid.

use num_complex::Complex64;

/// Closed rectangle of lattice indices `i0..=i1` (real axis) by `j0..=j1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeRect {
    pub i0: i64,
    pub i1: i64,
    pub j0: i64,
    pub j1: i64,
}

impl LatticeRect {
    pub fn is_empty(&self) -> bool {
        self.i0 > self.i1 || self.j0 > self.j1
    }

    pub fn count(&self) -> u128 {
        if self.is_empty() {
            0
        } else {
            (self.i1 - self.i0 + 1) as u128 * (self.j1 - self.j0 + 1) as u128
        }
    }

    /// Smallest rectangle containing every lattice point of the closed
    /// real box `[re_min, re_max] x [im_min, im_max]`.
    pub fn covering(re_min: f64, re_max: f64, im_min: f64, im_max: f64, h: f64) -> LatticeRect {
        LatticeRect {
            i0: (re_min / h).ceil() as i64,
            i1: (re_max / h).floor() as i64,
            j0: (im_min / h).ceil() as i64,
            j1: (im_max / h).floor() as i64,
        }
    }

    fn split(&self) -> (LatticeRect, LatticeRect) {
        if self.i1 - self.i0 >= self.j1 - self.j0 {
            let mid = self.i0 + (self.i1 - self.i0) / 2;
            (LatticeRect { i1: mid, ..*self }, LatticeRect { i0: mid + 1, ..*self })
        } else {
            let mid = self.j0 + (self.j1 - self.j0) / 2;
            (LatticeRect { j1: mid, ..*self }, LatticeRect { j0: mid + 1, ..*self })
        }
    }
}

/// Modulus model `prod |z - roots| / prod |z - poles|` with an absolute
/// uncertainty `slack` on every root location.
#[derive(Debug, Clone)]
pub struct FactoredModulus {
    pub roots: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    pub slack: f64,
}

impl FactoredModulus {
    /// `ln |f(z)|` from the factored form.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        let num: f64 = self.roots.iter().map(|r| (z - r).norm().ln()).sum();
        let den: f64 = self.poles.iter().map(|p| (z - p).norm().ln()).sum();
        num - den
    }

    /// Lower bound of `ln |f|` over the real box, or `-inf` if a root may lie
    /// inside it.
    fn log_lower_bound(&self, re: (f64, f64), im: (f64, f64)) -> f64 {
        let mut acc = 0.0;
        for r in &self.roots {
            let dx = (re.0 - r.re).max(r.re - re.1).max(0.0);
            let dy = (im.0 - r.im).max(r.im - im.1).max(0.0);
            let d = dx.hypot(dy) - self.slack;
            if d <= 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += d.ln();
        }
        for p in &self.poles {
            let dx = (p.re - re.0).abs().max((p.re - re.1).abs());
            let dy = (p.im - im.0).abs().max((p.im - im.1).abs());
            acc -= (dx.hypot(dy) + self.slack).ln();
        }
        acc
    }
}

/// Region restriction applied on top of the rectangle.
pub trait Region {
    /// False only if no lattice point of `rect` belongs to the region.
    fn may_intersect(&self, rect: &LatticeRect) -> bool;
    fn contains(&self, i: i64, j: i64) -> bool;
}

/// Every point of the rectangle.
pub struct Everywhere;

impl Region for Everywhere {
    fn may_intersect(&self, _: &LatticeRect) -> bool {
        true
    }
    fn contains(&self, _: i64, _: i64) -> bool {
        true
    }
}

/// Lattice points `(i + ij) h` with `|z| <= radius`.
pub struct ClosedDisk {
    pub h: f64,
    pub radius: f64,
}

impl ClosedDisk {
    fn radius_in_steps_sq(&self) -> f64 {
        let r = self.radius / self.h;
        r * r
    }
}

impl Region for ClosedDisk {
    fn may_intersect(&self, rect: &LatticeRect) -> bool {
        let nearest = |lo: i64, hi: i64| (lo.max(0) + hi.min(0)) as f64;
        let di = nearest(rect.i0, rect.i1);
        let dj = nearest(rect.j0, rect.j1);
        di * di + dj * dj <= self.radius_in_steps_sq() * (1.0 + 1e-12)
    }

    fn contains(&self, i: i64, j: i64) -> bool {
        let sq = (i as i128 * i as i128 + j as i128 * j as i128) as f64;
        sq <= self.radius_in_steps_sq()
    }
}

/// Scan configuration shared by the matrix and Schrodinger algorithms.
#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Visit every point instead of pruning (slow; used for verification).
    pub exhaustive: bool,
    /// A rectangle is discarded only when its lower bound exceeds
    /// `tau * prune_margin`.
    pub prune_margin: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            exhaustive: false,
            prune_margin: 2.0,
        }
    }
}

/// Collects lattice points of `rect` inside `region` that satisfy `accept`,
/// using `model` with threshold `ln tau` to discard rectangles.
#[allow(clippy::too_many_arguments)]
pub fn threshold_scan<R, F>(
    rect: LatticeRect,
    h: f64,
    model: &FactoredModulus,
    log_tau: f64,
    region: &R,
    options: ScanOptions,
    mut accept: F,
    out: &mut Vec<(i64, i64)>,
) where
    R: Region + ?Sized,
    F: FnMut(i64, i64) -> bool,
{
    if rect.is_empty() {
        return;
    }
    if options.exhaustive {
        for i in rect.i0..=rect.i1 {
            for j in rect.j0..=rect.j1 {
                if region.contains(i, j) && accept(i, j) {
                    out.push((i, j));
                }
            }
        }
        return;
    }
    let log_cut = log_tau + options.prune_margin.ln();
    let mut stack = vec![rect];
    while let Some(r) = stack.pop() {
        if !region.may_intersect(&r) {
            continue;
        }
        let re = (r.i0 as f64 * h, r.i1 as f64 * h);
        let im = (r.j0 as f64 * h, r.j1 as f64 * h);
        if model.log_lower_bound(re, im) > log_cut {
            continue;
        }
        if r.count() <= 4 {
            for i in r.i0..=r.i1 {
                for j in r.j0..=r.j1 {
                    if region.contains(i, j) && accept(i, j) {
                        out.push((i, j));
                    }
                }
            }
            continue;
        }
        let (a, b) = r.split();
        stack.push(b);
        stack.push(a);
    }
}
