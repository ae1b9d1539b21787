//! Nearest-better clustering features.
//!
//! Point `j` is better than point `i` when `(y_j, j) < (y_i, i)`, so ties in
//! `y` are broken by index. The overall best point has no nearest better
//! neighbour and is left out of the distance statistics.

use super::{prefixed, stats, FeatureVector};
use crate::error::{Error, Result};
use crate::sampling::SampleDesign;

pub fn names() -> Vec<String> {
    prefixed("nbc", &["nn_nb.sd_ratio", "nn_nb.mean_ratio", "nn_nb.cor", "nb_fitness.cor"])
}

#[derive(Debug, Clone)]
pub struct NearestBetter {
    pub nn_dist: Vec<f64>,
    /// `None` for the best point.
    pub nb: Vec<Option<usize>>,
    pub nb_dist: Vec<f64>,
}

pub fn nearest_better(points: &[Vec<f64>], y: &[f64]) -> NearestBetter {
    let n = points.len();
    let better = |j: usize, i: usize| y[j] < y[i] || (y[j] == y[i] && j < i);
    let mut nn_dist = vec![f64::INFINITY; n];
    let mut nb = vec![None; n];
    let mut nb_dist = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = stats::euclidean(&points[i], &points[j]);
            if d < nn_dist[i] {
                nn_dist[i] = d;
            }
            if better(j, i) && d < nb_dist[i] {
                nb_dist[i] = d;
                nb[i] = Some(j);
            }
        }
    }
    NearestBetter { nn_dist, nb, nb_dist }
}

pub fn nbc(design: &SampleDesign) -> Result<FeatureVector> {
    let y = design.values()?;
    let n = y.len();
    if n < 5 {
        return Err(Error::InvalidArgument(format!("nbc needs n >= 5, got {n}")));
    }
    let rel = nearest_better(&design.points, y);
    let (mut nn, mut nbd) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut indegree = vec![0.0; n];
    for i in 0..n {
        if let Some(j) = rel.nb[i] {
            nn.push(rel.nn_dist[i]);
            nbd.push(rel.nb_dist[i]);
            indegree[j] += 1.0;
        }
    }
    let values = vec![
        stats::ratio(stats::sd(&nn), stats::sd(&nbd)),
        stats::ratio(stats::mean(&nn), stats::mean(&nbd)),
        stats::pearson(&nn, &nbd),
        stats::pearson(y, &indegree),
    ];
    Ok(FeatureVector::new(names(), values, n))
}
