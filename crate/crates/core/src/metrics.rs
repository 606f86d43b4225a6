//! Hausdorff and Attouch-Wets distances between finite point clouds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SpectraError};

pub const DEFAULT_N_MAX: u32 = 40;
pub const SAMPLING_POINTS: usize = 10_000;

/// Non-empty finite set of complex points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Complex64>,
}

impl PointSet {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(SpectraError::EmptySet);
        }
        if points.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(invalid("points", "coordinates must be finite"));
        }
        Ok(PointSet { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    fn radius(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Exact nearest-point queries over a median-split 2-d tree stored
/// implicitly: the node of `order[lo..hi]` is at `(lo + hi) / 2` and splits
/// on the real part at even depth.
struct NearestIndex<'a> {
    points: &'a [Complex64],
    order: Vec<usize>,
}

fn coord(z: Complex64, axis: usize) -> f64 {
    if axis == 0 {
        z.re
    } else {
        z.im
    }
}

impl<'a> NearestIndex<'a> {
    fn new(points: &'a [Complex64]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        Self::build(points, &mut order, 0);
        NearestIndex { points, order }
    }

    fn build(points: &[Complex64], order: &mut [usize], axis: usize) {
        if order.len() <= 1 {
            return;
        }
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| coord(points[a], axis).total_cmp(&coord(points[b], axis)));
        let (left, right) = order.split_at_mut(mid);
        Self::build(points, left, 1 - axis);
        Self::build(points, &mut right[1..], 1 - axis);
    }

    fn distance(&self, z: Complex64) -> f64 {
        self.nearest(z).0
    }

    /// Distance to and index of a nearest point.
    fn nearest(&self, z: Complex64) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        self.search(z, 0, self.order.len(), 0, &mut best);
        best
    }

    fn search(&self, z: Complex64, lo: usize, hi: usize, axis: usize, best: &mut (f64, usize)) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let i = self.order[mid];
        let d = (self.points[i] - z).norm();
        if d < best.0 {
            *best = (d, i);
        }
        let offset = coord(z, axis) - coord(self.points[i], axis);
        let (near, far) = if offset < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(z, near.0, near.1, 1 - axis, best);
        if offset.abs() <= best.0 {
            self.search(z, far.0, far.1, 1 - axis, best);
        }
    }
}

/// `sup_{a in from} dist(a, to)`.
pub fn directed_hausdorff(from: &PointSet, to: &PointSet) -> f64 {
    let index = NearestIndex::new(&to.points);
    from.points.iter().map(|&z| index.distance(z)).fold(0.0, f64::max)
}

pub fn hausdorff(p: &PointSet, q: &PointSet) -> f64 {
    directed_hausdorff(p, q).max(directed_hausdorff(q, p))
}

/// Reference evaluation by the double loop.
pub fn hausdorff_brute(p: &PointSet, q: &PointSet) -> f64 {
    let directed = |a: &[Complex64], b: &[Complex64]| {
        a.iter()
            .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(&p.points, &q.points).max(directed(&q.points, &p.points))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupMethod {
    /// Cloud points, radial boundary points and nearest-pair midpoints,
    /// plus an angular sweep of the boundary.
    Candidates,
    /// Polar sampling of the ball at `SAMPLING_POINTS` points.
    Sampling,
}

struct Pair<'a> {
    p: NearestIndex<'a>,
    q: NearestIndex<'a>,
}

impl Pair<'_> {
    fn gap(&self, z: Complex64) -> f64 {
        (self.p.distance(z) - self.q.distance(z)).abs()
    }
}

/// Midpoints between each point and its nearest neighbour in the other cloud.
fn pair_midpoints(pair: &Pair) -> Vec<Complex64> {
    let across = |from: &NearestIndex, to: &NearestIndex| -> Vec<Complex64> {
        from.points
            .iter()
            .map(|&z| 0.5 * (z + to.points[to.nearest(z).1]))
            .collect()
    };
    let mut out = across(&pair.p, &pair.q);
    out.extend(across(&pair.q, &pair.p));
    out
}

fn ball_sup(pair: &Pair, all: &[Complex64], midpoints: &[Complex64], radius: f64, method: SupMethod) -> f64 {
    let mut best: f64 = 0.0;
    let mut probe = |z: Complex64| {
        if z.norm() <= radius {
            best = best.max(pair.gap(z));
        }
    };
    match method {
        SupMethod::Candidates => {
            for &z in all {
                probe(z);
                let r = z.norm();
                if r > 0.0 {
                    probe(z * (radius / r));
                    probe(-z * (radius / r));
                }
            }
            for &z in midpoints {
                probe(z);
            }
            let sweep = 1024;
            for k in 0..sweep {
                probe(Complex64::from_polar(
                    radius,
                    2.0 * std::f64::consts::PI * k as f64 / sweep as f64,
                ));
            }
        }
        SupMethod::Sampling => {
            let rings = 100;
            let per_ring = SAMPLING_POINTS / rings;
            for a in 1..=rings {
                let r = radius * a as f64 / rings as f64;
                for k in 0..per_ring {
                    probe(Complex64::from_polar(
                        r,
                        2.0 * std::f64::consts::PI * k as f64 / per_ring as f64,
                    ));
                }
            }
            probe(Complex64::new(0.0, 0.0));
        }
    }
    best
}

/// `sum_{n=1}^{n_max} 2^-n min(1, sup_{|z| <= n} |dist(z,P) - dist(z,Q)|)`;
/// the omitted tail is at most `2^-n_max`.
pub fn attouch_wets(p: &PointSet, q: &PointSet, n_max: u32) -> Result<f64> {
    attouch_wets_with(p, q, n_max, SupMethod::Candidates)
}

pub fn attouch_wets_with(p: &PointSet, q: &PointSet, n_max: u32, method: SupMethod) -> Result<f64> {
    if n_max < 1 {
        return Err(invalid("n_max", "need at least one term"));
    }
    let pair = Pair {
        p: NearestIndex::new(&p.points),
        q: NearestIndex::new(&q.points),
    };
    let all: Vec<Complex64> = p.points.iter().chain(&q.points).copied().collect();
    let midpoints = match method {
        SupMethod::Candidates => pair_midpoints(&pair),
        SupMethod::Sampling => Vec::new(),
    };
    // Once the ball holds both clouds the sup equals the Hausdorff distance
    // (bounded by it everywhere, attained at a cloud point).
    let enclosing = p.radius().max(q.radius());
    let d_h = hausdorff(p, q);
    let mut total = 0.0;
    for n in 1..=n_max {
        let weight = 0.5f64.powi(n as i32);
        let radius = n as f64;
        let term = if radius > enclosing && method == SupMethod::Candidates {
            d_h
        } else {
            ball_sup(&pair, &all, &midpoints, radius, method)
        };
        total += weight * term.min(1.0);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(points: &[(f64, f64)]) -> PointSet {
        PointSet::new(points.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(hausdorff(&set(&[(0.0, 0.0)]), &set(&[(0.0, 0.0)])), 0.0);
        assert_eq!(hausdorff(&set(&[(0.0, 0.0)]), &set(&[(1.0, 0.0)])), 1.0);
        assert_eq!(hausdorff(&set(&[(0.0, 0.0), (2.0, 0.0)]), &set(&[(1.0, 0.0)])), 1.0);
        assert!(PointSet::new(vec![]).is_err());
    }

    #[test]
    fn attouch_wets_examples() {
        let a = set(&[(0.0, 0.0)]);
        let b = set(&[(1.0, 0.0)]);
        let d = attouch_wets(&a, &b, 30).unwrap();
        assert!((1.0 - 0.5f64.powi(30)..=1.0).contains(&d), "{d}");
        let s = attouch_wets_with(&a, &b, 30, SupMethod::Sampling).unwrap();
        assert!((s - d).abs() < 1e-12);
        assert_eq!(attouch_wets(&a, &a, 30).unwrap(), 0.0);
        assert!(attouch_wets(&a, &b, 0).is_err());
    }

    #[test]
    fn far_clouds_enter_late_balls() {
        let a = set(&[(10.0, 0.0)]);
        let b = set(&[(10.0, 0.5)]);
        let d = attouch_wets(&a, &b, 40).unwrap();
        let s = attouch_wets_with(&a, &b, 40, SupMethod::Sampling).unwrap();
        assert!(d > 0.0 && d <= 0.5);
        // Sampling can only miss part of each sup.
        assert!(s <= d + 1e-12 && s > d - 1e-2, "{s} {d}");
    }

    #[test]
    fn lattice_clouds_with_shared_coordinates() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let mut pick = |n: usize| -> Vec<(f64, f64)> {
            (0..n)
                .map(|_| (rng.gen_range(0..6) as f64 / 8.0, rng.gen_range(-40..40) as f64 / 64.0))
                .collect()
        };
        for _ in 0..20 {
            let (a, b) = (set(&pick(300)), set(&pick(7)));
            assert_eq!(hausdorff(&a, &b), hausdorff_brute(&a, &b));
        }
    }

    fn cloud() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-0.7f64..0.7, -0.7f64..0.7), 1..12)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn metric_axioms(a in cloud(), b in cloud(), c in cloud()) {
            let (a, b, c) = (set(&a), set(&b), set(&c));
            let ab = hausdorff(&a, &b);
            prop_assert_eq!(ab, hausdorff(&b, &a));
            prop_assert_eq!(ab, hausdorff_brute(&a, &b));
            prop_assert!(ab <= hausdorff(&a, &c) + hausdorff(&c, &b) + 1e-12);
            prop_assert_eq!(hausdorff(&a, &a), 0.0);

            let aw = attouch_wets(&a, &b, 30).unwrap();
            prop_assert_eq!(aw, attouch_wets(&b, &a, 30).unwrap());
            prop_assert!(aw <= 1.0);
            prop_assert!(aw <= ab + 0.5f64.powi(30));
            let series: f64 = (1..=30).map(|n| 0.5f64.powi(n) * ab.min(1.0)).sum();
            prop_assert!((aw - series).abs() <= 0.5f64.powi(29));
            let ac = attouch_wets(&a, &c, 30).unwrap();
            let cb = attouch_wets(&c, &b, 30).unwrap();
            prop_assert!(aw <= ac + cb + 1e-12);
        }
    }
}
