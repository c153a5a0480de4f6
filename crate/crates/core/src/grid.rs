//! Sampling grids shared by the scans.

use serde::{Deserialize, Serialize};

/// A closed window `[lo, hi]` sampled at `points` equally spaced nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for ScanWindow {
    fn default() -> Self {
        ScanWindow { lo: -1e3, hi: 1e3, points: 10_000 }
    }
}

impl ScanWindow {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        ScanWindow { lo, hi, points }
    }

    /// Smallest window with the same density that also covers `[a, b]`.
    pub fn covering(&self, a: f64, b: f64) -> Self {
        ScanWindow { lo: self.lo.min(a), hi: self.hi.max(b), points: self.points }
    }

    pub fn nodes(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.points)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.points.max(2) - 1) as f64
    }
}

/// `n` equally spaced points from `lo` to `hi` inclusive; both ends are exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let mut v: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * (k as f64 / (n - 1) as f64)).collect();
            v[n - 1] = hi;
            v
        }
    }
}

/// Symmetric grid on `[-x_max, x_max]` mixing uniform spacing with
/// logarithmic spacing from `1e-2` outward, so that growth fits see several
/// decades of `|x|`.
pub fn growth_grid(x_max: f64, uniform: usize, per_decade: usize) -> Vec<f64> {
    let mut pts = linspace(-x_max, x_max, uniform);
    let lo = 1e-2f64.min(x_max / 100.0);
    let decades = (x_max / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(2);
    for k in 0..n {
        let r = lo * 10f64.powf(decades * k as f64 / (n - 1) as f64);
        let r = r.min(x_max);
        pts.push(r);
        pts.push(-r);
    }
    pts.push(0.0);
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_ends() {
        let v = linspace(-3.0, 3.0, 7);
        assert_eq!(v, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn growth_grid_spans_decades() {
        let g = growth_grid(20.0, 401, 16);
        assert_eq!(*g.first().unwrap(), -20.0);
        assert_eq!(*g.last().unwrap(), 20.0);
        let min_pos = g.iter().copied().filter(|x| *x > 0.0).fold(f64::INFINITY, f64::min);
        assert!(20.0 / min_pos >= 100.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
