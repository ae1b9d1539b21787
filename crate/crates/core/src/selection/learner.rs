//! The fit/predict interface and the built-in learners.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree, Tree, TreeParams};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Classes { labels: &'a [usize], n_classes: usize },
    Values(&'a [f64]),
}

impl Target<'_> {
    pub fn len(&self) -> usize {
        match self {
            Target::Classes { labels, .. } => labels.len(),
            Target::Values(y) => y.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, Target::Classes { .. })
    }
}

/// A supervised learner. `fit` must be a pure function of its arguments.
pub trait Learner: Send + Sync {
    fn id(&self) -> &'static str;
    fn fit(&self, x: &[Vec<f64>], target: &Target, seed: u64) -> Result<Fitted>;
}

/// A fitted model. Classification models return one score per class (the
/// predicted class has the largest), regression models a single value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fitted {
    Constant { scores: Vec<f64> },
    Tree { tree: Tree },
    Forest { trees: Vec<Tree>, classification: bool },
    Knn(Knn),
}

impl Fitted {
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Fitted::Constant { scores } => scores.clone(),
            Fitted::Tree { tree } => tree.predict(x).to_vec(),
            Fitted::Forest { trees, classification } => {
                if *classification {
                    let mut votes = vec![0.0; trees[0].predict(x).len()];
                    for t in trees {
                        votes[argmax(t.predict(x))] += 1.0;
                    }
                    votes.iter_mut().for_each(|v| *v /= trees.len() as f64);
                    votes
                } else {
                    vec![trees.iter().map(|t| t.predict(x)[0]).sum::<f64>() / trees.len() as f64]
                }
            }
            Fitted::Knn(k) => k.scores(x),
        }
    }

    pub fn predict_class(&self, x: &[f64]) -> usize {
        argmax(&self.scores(x))
    }

    pub fn predict_value(&self, x: &[f64]) -> f64 {
        self.scores(x)[0]
    }
}

/// Index of the largest value; the first one on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Index of the smallest value; the first one on ties.
pub fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}

fn check(x: &[Vec<f64>], target: &Target) -> Result<()> {
    if x.is_empty() || x.len() != target.len() {
        return Err(Error::InvalidArgument(format!(
            "training data has {} rows and {} targets",
            x.len(),
            target.len()
        )));
    }
    Ok(())
}

/// Predicts the majority class or the mean.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstantLearner;

impl Learner for ConstantLearner {
    fn id(&self) -> &'static str {
        "constant"
    }

    fn fit(&self, x: &[Vec<f64>], target: &Target, _seed: u64) -> Result<Fitted> {
        check(x, target)?;
        Ok(constant_fit(target))
    }
}

pub fn constant_fit(target: &Target) -> Fitted {
    let scores = match target {
        Target::Classes { labels, n_classes } => {
            let mut p = vec![0.0; *n_classes];
            for &l in *labels {
                p[l] += 1.0 / labels.len() as f64;
            }
            p
        }
        Target::Values(y) => vec![y.iter().sum::<f64>() / y.len() as f64],
    };
    Fitted::Constant { scores }
}

impl Learner for TreeParams {
    fn id(&self) -> &'static str {
        "tree"
    }

    fn fit(&self, x: &[Vec<f64>], target: &Target, seed: u64) -> Result<Fitted> {
        check(x, target)?;
        Ok(Fitted::Tree { tree: fit_tree(x, target, (0..x.len()).collect(), *self, seed) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub trees: usize,
    /// Features tried per split; `floor(sqrt(p))` for classification and
    /// `max(floor(p / 3), 1)` for regression when `None`.
    pub mtry: Option<usize>,
    /// Minimum node size to split: 2 for classification and 5 for
    /// regression when `None`.
    pub min_split: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { trees: 500, mtry: None, min_split: None }
    }
}

impl ForestParams {
    pub fn default_mtry(p: usize, classification: bool) -> usize {
        if classification {
            ((p as f64).sqrt().floor() as usize).max(1)
        } else {
            (p / 3).max(1)
        }
    }
}

impl Learner for ForestParams {
    fn id(&self) -> &'static str {
        "forest"
    }

    fn fit(&self, x: &[Vec<f64>], target: &Target, seed: u64) -> Result<Fitted> {
        check(x, target)?;
        if self.trees == 0 {
            return Err(Error::InvalidArgument("forest needs at least one tree".into()));
        }
        let classification = target.is_classification();
        let p = x[0].len();
        let params = TreeParams {
            min_split: self.min_split.unwrap_or(if classification { 2 } else { 5 }),
            min_leaf: 1,
            max_depth: usize::MAX,
            cp: 0.0,
            mtry: Some(self.mtry.unwrap_or_else(|| ForestParams::default_mtry(p, classification)).min(p)),
        };
        let n = x.len();
        let trees: Vec<Tree> = (0..self.trees)
            .into_par_iter()
            .map(|t| {
                let s = rng::derive_seed(seed, &[t as u64]);
                let mut r = rng::rng(s);
                let boot: Vec<usize> = (0..n).map(|_| r.random_range(0..n)).collect();
                fit_tree(x, target, boot, params, rng::derive_seed(s, &[1]))
            })
            .collect();
        Ok(Fitted::Forest { trees, classification })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

/// k-nearest neighbours on standardised features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub labels: Option<(Vec<usize>, usize)>,
    pub values: Option<Vec<f64>>,
}

impl Knn {
    fn standardise(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.center).zip(&self.scale).map(|((v, c), s)| (v - c) / s).collect()
    }

    /// Training rows ordered by distance to `x`, ties by index.
    fn neighbours(&self, x: &[f64]) -> Vec<usize> {
        let z = self.standardise(x);
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, row)| (row.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d.into_iter().take(self.k.min(self.x.len())).map(|(_, i)| i).collect()
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        let nb = self.neighbours(x);
        match (&self.labels, &self.values) {
            (Some((labels, n_classes)), _) => {
                // votes, with a small bonus for closer neighbours to break ties
                let mut votes = vec![0.0; *n_classes];
                for (rank, &i) in nb.iter().enumerate() {
                    votes[labels[i]] += 1.0 + 1e-6 * (nb.len() - rank) as f64;
                }
                votes
            }
            (None, Some(values)) => vec![nb.iter().map(|&i| values[i]).sum::<f64>() / nb.len() as f64],
            (None, None) => unreachable!("knn model without targets"),
        }
    }
}

impl Learner for KnnParams {
    fn id(&self) -> &'static str {
        "knn"
    }

    fn fit(&self, x: &[Vec<f64>], target: &Target, _seed: u64) -> Result<Fitted> {
        check(x, target)?;
        if self.k == 0 {
            return Err(Error::InvalidArgument("knn needs k >= 1".into()));
        }
        let p = x[0].len();
        let n = x.len() as f64;
        let center: Vec<f64> = (0..p).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let scale: Vec<f64> = (0..p)
            .map(|j| {
                let v = x.iter().map(|r| (r[j] - center[j]).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
                if v > 0.0 {
                    v.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let mut knn = Knn { k: self.k, center, scale, x: Vec::new(), labels: None, values: None };
        knn.x = x.iter().map(|r| knn.standardise(r)).collect();
        match target {
            Target::Classes { labels, n_classes } => knn.labels = Some((labels.to_vec(), *n_classes)),
            Target::Values(y) => knn.values = Some(y.to_vec()),
        }
        Ok(Fitted::Knn(knn))
    }
}

/// A learner choice with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "snake_case")]
pub enum LearnerConfig {
    Tree(TreeParams),
    Forest(ForestParams),
    Knn(KnnParams),
    Constant,
}

impl LearnerConfig {
    pub fn learner(&self) -> &dyn Learner {
        match self {
            LearnerConfig::Tree(p) => p,
            LearnerConfig::Forest(p) => p,
            LearnerConfig::Knn(p) => p,
            LearnerConfig::Constant => &ConstantLearner,
        }
    }

    pub fn id(&self) -> &'static str {
        self.learner().id()
    }
}

impl fmt::Display for LearnerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Parses a learner id with default parameters.
impl FromStr for LearnerConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tree" => Ok(LearnerConfig::Tree(TreeParams::default())),
            "forest" => Ok(LearnerConfig::Forest(ForestParams::default())),
            "knn" => Ok(LearnerConfig::Knn(KnnParams::default())),
            "constant" => Ok(LearnerConfig::Constant),
            other => Err(Error::InvalidArgument(format!(
                "unknown learner {other:?} (available: tree, forest, knn, constant)"
            ))),
        }
    }
}
