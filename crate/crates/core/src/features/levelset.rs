//! Levelset features: how well linear, quadratic and mixture discriminant
//! analysis separate the points below a y-quantile from the rest.
//!
//! For each quantile `q` the split label is `y <= y_(j)`, the `j`-th order
//! statistic with `j = floor(q (n - 1))`. This is the set of points below the
//! interpolated `q`-quantile, and it depends only on the ranks of `y`.
//! Errors are mean misclassification rates over a seeded stratified 10-fold
//! cross-validation.
//!
//! The mixture model uses two Gaussian components per class with one
//! covariance shared by all components, fitted by 20 EM iterations from a
//! k-means++ start.

use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::seq::SliceRandom;
use rand::Rng;

use super::{stats, FeatureVector};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_regularized, log_det, mahalanobis_sq};
use crate::rng;
use crate::sampling::SampleDesign;

const FOLDS: usize = 10;
const MDA_COMPONENTS: usize = 2;
const EM_ITERATIONS: usize = 20;

fn pct(q: f64) -> String {
    format!("{:02}", (q * 100.0).round() as u32)
}

pub fn names(quantiles: &[f64]) -> Vec<String> {
    let mut out = Vec::new();
    for &q in quantiles {
        let p = pct(q);
        for stat in ["mmce_lda", "mmce_qda", "mmce_mda", "lda_qda", "lda_mda", "qda_mda"] {
            out.push(format!("ela_level.{stat}_{p}"));
        }
    }
    out.push("ela_level.degenerate".into());
    out
}

/// `y_i <= y_(floor(q (n - 1)))`.
pub fn quantile_labels(y: &[f64], q: f64) -> Vec<bool> {
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let j = ((q * (y.len() - 1) as f64) + 1e-12).floor() as usize;
    let threshold = sorted[j.min(y.len() - 1)];
    y.iter().map(|&v| v <= threshold).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discriminant {
    Linear,
    Quadratic,
    Mixture,
}

struct Gaussian {
    mean: Vec<f64>,
    chol: Cholesky<f64, Dyn>,
    log_det: f64,
}

impl Gaussian {
    fn log_density(&self, x: &[f64]) -> f64 {
        -0.5 * (mahalanobis_sq(&self.chol, x, &self.mean) + self.log_det)
    }
}

/// A fitted two-class discriminant: per class, a log-prior and weighted
/// Gaussian components.
struct Fitted {
    classes: Vec<(f64, Vec<(f64, Gaussian)>)>,
}

impl Fitted {
    fn predict(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (c, (log_prior, comps)) in self.classes.iter().enumerate() {
            let terms: Vec<f64> = comps
                .iter()
                .filter(|(w, _)| *w > 0.0)
                .map(|(w, g)| w.ln() + g.log_density(x))
                .collect();
            let score = log_prior + log_sum_exp(&terms);
            if score > best.1 {
                best = (c, score);
            }
        }
        best.0
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

fn mean_of(points: &[&[f64]], d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d];
    for p in points {
        for k in 0..d {
            m[k] += p[k];
        }
    }
    m.iter_mut().for_each(|v| *v /= points.len() as f64);
    m
}

/// Scatter matrix `sum w (x - mu)(x - mu)^T`.
fn add_scatter(acc: &mut DMatrix<f64>, x: &[f64], mu: &[f64], w: f64) {
    let d = x.len();
    for a in 0..d {
        let da = x[a] - mu[a];
        for b in 0..d {
            acc[(a, b)] += w * da * (x[b] - mu[b]);
        }
    }
}

fn gaussian(mean: Vec<f64>, cov: &DMatrix<f64>, degenerate: &mut bool) -> Gaussian {
    let (chol, reg) = cholesky_regularized(cov);
    *degenerate |= reg;
    let log_det = log_det(&chol);
    Gaussian { mean, chol, log_det }
}

fn fit_linear(groups: &[Vec<&[f64]>], d: usize, n: usize, degenerate: &mut bool, quadratic: bool) -> Fitted {
    let means: Vec<Vec<f64>> = groups.iter().map(|g| mean_of(g, d)).collect();
    let mut pooled = DMatrix::zeros(d, d);
    let mut classes = Vec::new();
    let mut per_class_cov = Vec::new();
    for (g, mu) in groups.iter().zip(&means) {
        let mut s = DMatrix::zeros(d, d);
        for x in g {
            add_scatter(&mut s, x, mu, 1.0);
        }
        pooled += &s;
        let denom = (g.len() as f64 - 1.0).max(1.0);
        per_class_cov.push(s / denom);
    }
    let dof = (n as f64 - groups.len() as f64).max(1.0);
    pooled /= dof;
    for (c, g) in groups.iter().enumerate() {
        let cov = if quadratic { &per_class_cov[c] } else { &pooled };
        let prior = (g.len() as f64 / n as f64).ln();
        classes.push((prior, vec![(1.0, gaussian(means[c].clone(), cov, degenerate))]));
    }
    Fitted { classes }
}

/// k-means++ seeding of `k` centres.
fn kmeans_pp(points: &[&[f64]], k: usize, rng: &mut rng::Rng) -> Vec<Vec<f64>> {
    let mut centres = vec![points[rng.random_range(0..points.len())].to_vec()];
    while centres.len() < k {
        let d2: Vec<f64> = points
            .iter()
            .map(|p| {
                centres
                    .iter()
                    .map(|c| stats::euclidean(p, c).powi(2))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut idx = points.len() - 1;
            for (i, w) in d2.iter().enumerate() {
                if u < *w {
                    idx = i;
                    break;
                }
                u -= w;
            }
            idx
        } else {
            rng.random_range(0..points.len())
        };
        centres.push(points[pick].to_vec());
    }
    centres
}

fn fit_mixture(groups: &[Vec<&[f64]>], d: usize, n: usize, rng: &mut rng::Rng, degenerate: &mut bool) -> Fitted {
    // responsibilities[c][i][k]
    let mut resp: Vec<Vec<[f64; MDA_COMPONENTS]>> = groups
        .iter()
        .map(|g| {
            let centres = kmeans_pp(g, MDA_COMPONENTS, rng);
            g.iter()
                .map(|x| {
                    let mut r = [0.0; MDA_COMPONENTS];
                    let nearest = (0..MDA_COMPONENTS)
                        .min_by(|&a, &b| {
                            stats::euclidean(x, &centres[a]).total_cmp(&stats::euclidean(x, &centres[b]))
                        })
                        .unwrap_or(0);
                    r[nearest] = 1.0;
                    r
                })
                .collect()
        })
        .collect();

    let mut means: Vec<Vec<Vec<f64>>> = groups
        .iter()
        .map(|g| vec![mean_of(g, d); MDA_COMPONENTS])
        .collect();
    let mut weights = vec![[1.0 / MDA_COMPONENTS as f64; MDA_COMPONENTS]; groups.len()];
    let mut fitted = None;

    for iter in 0..=EM_ITERATIONS {
        // M step
        let mut pooled = DMatrix::zeros(d, d);
        for (c, g) in groups.iter().enumerate() {
            for k in 0..MDA_COMPONENTS {
                let total: f64 = resp[c].iter().map(|r| r[k]).sum();
                weights[c][k] = total / g.len() as f64;
                if total > 1e-12 {
                    let mut m = vec![0.0; d];
                    for (x, r) in g.iter().zip(&resp[c]) {
                        for a in 0..d {
                            m[a] += r[k] * x[a];
                        }
                    }
                    m.iter_mut().for_each(|v| *v /= total);
                    means[c][k] = m;
                }
            }
            for (x, r) in g.iter().zip(&resp[c]) {
                for k in 0..MDA_COMPONENTS {
                    if r[k] > 0.0 {
                        add_scatter(&mut pooled, x, &means[c][k], r[k]);
                    }
                }
            }
        }
        pooled /= n as f64;
        let mut step_degenerate = false;
        let model = Fitted {
            classes: groups
                .iter()
                .enumerate()
                .map(|(c, g)| {
                    let comps = (0..MDA_COMPONENTS)
                        .map(|k| (weights[c][k], gaussian(means[c][k].clone(), &pooled, &mut step_degenerate)))
                        .collect();
                    ((g.len() as f64 / n as f64).ln(), comps)
                })
                .collect(),
        };
        if iter == EM_ITERATIONS {
            *degenerate |= step_degenerate;
            fitted = Some(model);
            break;
        }
        // E step, within each class
        for (c, g) in groups.iter().enumerate() {
            let comps = &model.classes[c].1;
            for (x, r) in g.iter().zip(resp[c].iter_mut()) {
                let logs: Vec<f64> = comps
                    .iter()
                    .map(|(w, gs)| if *w > 0.0 { w.ln() + gs.log_density(x) } else { f64::NEG_INFINITY })
                    .collect();
                let lse = log_sum_exp(&logs);
                for k in 0..MDA_COMPONENTS {
                    r[k] = if lse.is_finite() { (logs[k] - lse).exp() } else { 1.0 / MDA_COMPONENTS as f64 };
                }
            }
        }
    }
    fitted.expect("EM loop returns on the last iteration")
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin,
/// continuing the deal across classes so fold sizes stay balanced.
pub fn stratified_folds(labels: &[bool], folds: usize, rng: &mut rng::Rng) -> Vec<usize> {
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(rng);
        for i in idx {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    assignment
}

/// Mean cross-validated misclassification rate of the given discriminant.
pub fn cv_error(
    points: &[Vec<f64>],
    labels: &[bool],
    method: Discriminant,
    seed: u64,
    degenerate: &mut bool,
) -> f64 {
    let n = points.len();
    let d = points[0].len();
    let folds = FOLDS.min(n);
    let mut fold_rng = rng::rng(seed);
    let assignment = stratified_folds(labels, folds, &mut fold_rng);
    let mut errors = Vec::with_capacity(folds);
    for f in 0..folds {
        let mut groups: Vec<Vec<&[f64]>> = vec![Vec::new(), Vec::new()];
        for i in (0..n).filter(|&i| assignment[i] != f) {
            groups[usize::from(!labels[i])].push(&points[i]);
        }
        let present: Vec<usize> = (0..2).filter(|&c| !groups[c].is_empty()).collect();
        let train: Vec<Vec<&[f64]>> = present.iter().map(|&c| groups[c].clone()).collect();
        let n_train: usize = train.iter().map(Vec::len).sum();
        let mut rng = rng::rng(rng::derive_seed(seed, &[f as u64, method as u64]));
        let model = match method {
            Discriminant::Linear => fit_linear(&train, d, n_train, degenerate, false),
            Discriminant::Quadratic => fit_linear(&train, d, n_train, degenerate, true),
            Discriminant::Mixture => fit_mixture(&train, d, n_train, &mut rng, degenerate),
        };
        let test: Vec<usize> = (0..n).filter(|&i| assignment[i] == f).collect();
        if test.is_empty() {
            continue;
        }
        let wrong = test
            .iter()
            .filter(|&&i| {
                let class = present[model.predict(&points[i])];
                class != usize::from(!labels[i])
            })
            .count();
        errors.push(wrong as f64 / test.len() as f64);
    }
    stats::mean(&errors)
}

pub fn ela_levelset(design: &SampleDesign, quantiles: &[f64], seed: u64) -> Result<FeatureVector> {
    let y = design.values()?;
    let n = y.len();
    if n < 20 {
        return Err(Error::InvalidArgument(format!("levelset features need n >= 20, got {n}")));
    }
    let mut splits = Vec::with_capacity(quantiles.len());
    for &q in quantiles {
        let labels = quantile_labels(y, q);
        let below = labels.iter().filter(|&&l| l).count();
        if below < 2 || n - below < 2 {
            return Err(Error::InvalidArgument(format!(
                "quantile {q} leaves {below} of {n} points below the split"
            )));
        }
        splits.push(labels);
    }

    let mut values = Vec::new();
    let mut degenerate = false;
    for (qi, labels) in splits.iter().enumerate() {
        let s = rng::derive_seed(seed, &[qi as u64]);
        let lda = cv_error(&design.points, labels, Discriminant::Linear, s, &mut degenerate);
        let qda = cv_error(&design.points, labels, Discriminant::Quadratic, s, &mut degenerate);
        let mda = cv_error(&design.points, labels, Discriminant::Mixture, s, &mut degenerate);
        values.extend([
            lda,
            qda,
            mda,
            stats::ratio(lda, qda),
            stats::ratio(lda, mda),
            stats::ratio(qda, mda),
        ]);
    }
    values.push(if degenerate { 1.0 } else { 0.0 });
    Ok(FeatureVector::new(names(quantiles), values, n))
}
