//! CART decision trees for classification (Gini) and regression (squared
//! error).

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::learner::Target;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    /// Nodes with fewer samples are not split.
    pub min_split: usize,
    pub min_leaf: usize,
    pub max_depth: usize,
    /// Minimum impurity decrease of a split relative to the root impurity.
    pub cp: f64,
    /// Features tried per node; all when `None`.
    pub mtry: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { min_split: 20, min_leaf: 7, max_depth: 30, cp: 0.01, mtry: None }
    }
}

impl TreeParams {
    pub fn fully_grown() -> Self {
        TreeParams { min_split: 2, min_leaf: 1, max_depth: usize::MAX, cp: 0.0, mtry: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf(Vec<f64>),
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Class proportions, or a one-element vector holding the mean.
    pub fn predict(&self, x: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    target: &'a Target<'a>,
    params: TreeParams,
    min_gain: f64,
    rng: rng::Rng,
    nodes: Vec<Node>,
}

/// Impurity scaled by node size: `n * gini` or the sum of squared errors.
fn impurity(target: &Target, idx: &[usize]) -> f64 {
    match target {
        Target::Classes { labels, n_classes } => {
            let mut counts = vec![0usize; *n_classes];
            for &i in idx {
                counts[labels[i]] += 1;
            }
            gini_sum(&counts, idx.len())
        }
        Target::Values(y) => {
            let m = idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64;
            idx.iter().map(|&i| (y[i] - m).powi(2)).sum()
        }
    }
}

fn gini_sum(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    n - counts.iter().map(|&c| (c * c) as f64).sum::<f64>() / n
}

fn leaf_value(target: &Target, idx: &[usize]) -> Vec<f64> {
    match target {
        Target::Classes { labels, n_classes } => {
            let mut p = vec![0.0; *n_classes];
            for &i in idx {
                p[labels[i]] += 1.0;
            }
            p.iter_mut().for_each(|v| *v /= idx.len() as f64);
            p
        }
        Target::Values(y) => vec![idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64],
    }
}

/// A threshold `t` with `a <= t < b`.
fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m < b {
        m
    } else {
        a
    }
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn best_split(&mut self, idx: &[usize], parent: f64) -> Option<Candidate> {
        let p = self.x[0].len();
        let features: Vec<usize> = match self.params.mtry {
            Some(m) if m < p => {
                let mut f = sample(&mut self.rng, p, m.max(1)).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..p).collect(),
        };
        let n = idx.len();
        let min_leaf = self.params.min_leaf.max(1);
        let mut best: Option<Candidate> = None;
        let mut order = idx.to_vec();
        for f in features {
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            match self.target {
                Target::Classes { labels, n_classes } => {
                    let mut left = vec![0usize; *n_classes];
                    let mut right = vec![0usize; *n_classes];
                    for &i in &order {
                        right[labels[i]] += 1;
                    }
                    for k in 0..n - 1 {
                        let c = labels[order[k]];
                        left[c] += 1;
                        right[c] -= 1;
                        let (a, b) = (self.x[order[k]][f], self.x[order[k + 1]][f]);
                        if !a.is_finite() || !b.is_finite() || a >= b || k + 1 < min_leaf || n - k - 1 < min_leaf {
                            continue;
                        }
                        let gain = parent - gini_sum(&left, k + 1) - gini_sum(&right, n - k - 1);
                        if best.as_ref().is_none_or(|c| gain > c.gain) {
                            best = Some(Candidate { gain, feature: f, threshold: midpoint(a, b) });
                        }
                    }
                }
                Target::Values(y) => {
                    let total: f64 = order.iter().map(|&i| y[i]).sum();
                    let total_sq: f64 = order.iter().map(|&i| y[i] * y[i]).sum();
                    let (mut s, mut sq) = (0.0, 0.0);
                    for k in 0..n - 1 {
                        let v = y[order[k]];
                        s += v;
                        sq += v * v;
                        let (a, b) = (self.x[order[k]][f], self.x[order[k + 1]][f]);
                        if !a.is_finite() || !b.is_finite() || a >= b || k + 1 < min_leaf || n - k - 1 < min_leaf {
                            continue;
                        }
                        let (nl, nr) = ((k + 1) as f64, (n - k - 1) as f64);
                        let sse_l = sq - s * s / nl;
                        let sse_r = (total_sq - sq) - (total - s).powi(2) / nr;
                        let gain = parent - sse_l - sse_r;
                        if best.as_ref().is_none_or(|c| gain > c.gain) {
                            best = Some(Candidate { gain, feature: f, threshold: midpoint(a, b) });
                        }
                    }
                }
            }
        }
        best.filter(|c| c.gain > 1e-12 * parent.abs().max(1e-300) && c.gain >= self.min_gain)
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(leaf_value(self.target, &idx)));
        let parent = impurity(self.target, &idx);
        if idx.len() < self.params.min_split.max(2) || depth >= self.params.max_depth || parent <= 0.0 {
            return id;
        }
        let Some(c) = self.best_split(&idx, parent) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][c.feature] <= c.threshold);
        if l.is_empty() || r.is_empty() {
            return id;
        }
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split { feature: c.feature, threshold: c.threshold, left, right };
        id
    }
}

/// Fits a tree on the rows `idx` of `x` (rows may repeat, as in a bootstrap).
pub fn fit_tree(x: &[Vec<f64>], target: &Target, idx: Vec<usize>, params: TreeParams, seed: u64) -> Tree {
    let root = impurity(target, &idx);
    let mut b = Builder {
        x,
        target,
        params,
        min_gain: params.cp * root,
        rng: rng::rng(seed),
        nodes: Vec::new(),
    };
    b.grow(idx, 0);
    Tree { nodes: b.nodes }
}
