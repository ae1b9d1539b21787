//! Information content of a nearest-neighbour tour through the sample.

use serde::{Deserialize, Serialize};

use super::{prefixed, stats, FeatureVector};
use crate::error::{Error, Result};
use crate::sampling::SampleDesign;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IcConfig {
    pub eps_min_log10: f64,
    pub eps_max_log10: f64,
    pub points: usize,
    pub settling_threshold: f64,
}

impl Default for IcConfig {
    fn default() -> Self {
        IcConfig { eps_min_log10: -5.0, eps_max_log10: 15.0, points: 1000, settling_threshold: 0.05 }
    }
}

impl IcConfig {
    pub fn grid(&self) -> Vec<f64> {
        if self.points < 2 {
            return vec![10f64.powf(self.eps_min_log10)];
        }
        let step = (self.eps_max_log10 - self.eps_min_log10) / (self.points - 1) as f64;
        (0..self.points).map(|i| 10f64.powf(self.eps_min_log10 + step * i as f64)).collect()
    }
}

pub fn names() -> Vec<String> {
    prefixed("ic", &["h_max", "eps_s", "eps_max"])
}

/// Greedy nearest-neighbour ordering starting at index 0; ties go to the
/// lower index.
pub fn tour(points: &[Vec<f64>]) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = 0;
    visited[0] = true;
    order.push(0);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for j in 0..n {
            if !visited[j] {
                let d = stats::euclidean(&points[cur], &points[j]);
                if d < best_d || best == usize::MAX {
                    best_d = d;
                    best = j;
                }
            }
        }
        visited[best] = true;
        order.push(best);
        cur = best;
    }
    order
}

/// Slopes along the tour; coincident points give a signed infinity.
pub fn tour_slopes(points: &[Vec<f64>], y: &[f64], order: &[usize]) -> Vec<f64> {
    order
        .windows(2)
        .map(|w| {
            let dy = y[w[1]] - y[w[0]];
            let dx = stats::euclidean(&points[w[0]], &points[w[1]]);
            if dy == 0.0 {
                0.0
            } else if dx == 0.0 {
                dy.signum() * f64::INFINITY
            } else {
                dy / dx
            }
        })
        .collect()
}

/// Entropy of consecutive unequal symbol pairs, log base 6.
pub fn entropy(slopes: &[f64], eps: f64) -> f64 {
    let sym = |s: f64| -> usize {
        if s > eps {
            2
        } else if s < -eps {
            0
        } else {
            1
        }
    };
    if slopes.len() < 2 {
        return 0.0;
    }
    let mut counts = [[0usize; 3]; 3];
    for w in slopes.windows(2) {
        counts[sym(w[0])][sym(w[1])] += 1;
    }
    let total = (slopes.len() - 1) as f64;
    let mut h = 0.0;
    for (a, row) in counts.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if a != b && c > 0 {
                let p = c as f64 / total;
                h -= p * p.log(6.0);
            }
        }
    }
    h
}

pub fn ic(design: &SampleDesign, config: &IcConfig) -> Result<FeatureVector> {
    let y = design.values()?;
    let n = y.len();
    if n < 10 {
        return Err(Error::InvalidArgument(format!("information content needs n >= 10, got {n}")));
    }
    let grid = config.grid();
    let order = tour(&design.points);
    let slopes = tour_slopes(&design.points, y, &order);
    let hs: Vec<f64> = grid.iter().map(|&e| entropy(&slopes, e)).collect();
    let mut imax = 0;
    for (i, &h) in hs.iter().enumerate() {
        if h > hs[imax] {
            imax = i;
        }
    }
    let eps_s = hs
        .iter()
        .position(|&h| h < config.settling_threshold)
        .map(|i| grid[i])
        .unwrap_or(*grid.last().unwrap());
    let values = vec![hs[imax], eps_s.log10(), grid[imax].log10()];
    Ok(FeatureVector::new(names(), values, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::BoxDomain;

    fn line(y: Vec<f64>) -> SampleDesign {
        let points = (0..y.len()).map(|i| vec![i as f64 * 0.1 - 4.0]).collect();
        SampleDesign::from_parts(points, y, BoxDomain::bbob(1)).unwrap()
    }

    #[test]
    fn constant_y_has_no_information() {
        let fv = ic(&line(vec![3.0; 20]), &IcConfig::default()).unwrap();
        assert_eq!(fv.get("ic.h_max"), Some(0.0));
        assert_eq!(fv.get("ic.eps_s"), Some(-5.0));
    }

    #[test]
    fn alternating_steps() {
        let y: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 0.0 } else { 1.0 }).collect();
        let fv = ic(&line(y), &IcConfig::default()).unwrap();
        let expected = -2.0 * 0.5 * 0.5f64.log(6.0);
        assert!((fv.get("ic.h_max").unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.3869).abs() < 1e-4);
        // slopes are 10; everything above that is flat
        assert!(fv.get("ic.eps_s").unwrap() > 1.0 - 1e-9);
        assert!(fv.get("ic.eps_s").unwrap() < 1.03);
    }

    #[test]
    fn flat_above_max_slope() {
        let slopes = [1.0, -2.0, 3.0, -0.5];
        assert_eq!(entropy(&slopes, 3.5), 0.0);
        assert!(entropy(&slopes, 0.1) > 0.0);
    }

    #[test]
    fn tour_visits_every_point_once() {
        let points: Vec<Vec<f64>> = [3.0, 0.0, 2.0, 1.0].iter().map(|&v| vec![v]).collect();
        assert_eq!(tour(&points), vec![0, 2, 3, 1]);
    }

    #[test]
    fn grid_endpoints() {
        let g = IcConfig::default().grid();
        assert_eq!(g.len(), 1000);
        assert!((g[0] - 1e-5).abs() < 1e-20);
        assert!((g[999] / 1e15 - 1.0).abs() < 1e-12);
    }
}
