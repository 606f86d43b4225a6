use std::f64::consts::PI;

/// Plane-wave modes `k_j = 2 pi q_j` ordered by `|k|`, ties `+k` first:
/// `q = 0, 1, -1, 2, -2, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeIndexing {
    pub half_width: usize,
    pub q: Vec<i64>,
}

impl ModeIndexing {
    pub fn new(half_width: usize) -> Self {
        let mut q = Vec::with_capacity(2 * half_width + 1);
        q.push(0);
        for m in 1..=half_width as i64 {
            q.push(m);
            q.push(-m);
        }
        ModeIndexing { half_width, q }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn k(&self, j: usize) -> f64 {
        2.0 * PI * self.q[j] as f64
    }

    pub fn ks(&self) -> impl Iterator<Item = f64> + '_ {
        self.q.iter().map(|&q| 2.0 * PI * q as f64)
    }
}
