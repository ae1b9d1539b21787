//! Wrapper feature selection: floating forward/backward search and a
//! (mu + lambda) genetic algorithm, all scored by cross-validated mean relERT
//! including feature costs.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{lofo_cv, CostModel, Dataset, LearnerConfig, Paradigm};
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub mu: usize,
    pub lambda: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams { mu: 10, lambda: 5, generations: 100, mutation_rate: 0.05, crossover_rate: 0.5 }
    }
}

impl GaParams {
    pub fn with_lambda(lambda: usize) -> Self {
        GaParams { lambda, ..Default::default() }
    }

    /// Upper bound on distinct cross-validation runs.
    pub fn budget(&self) -> usize {
        self.mu + self.lambda * self.generations
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum FsStrategy {
    None,
    Sffs,
    Sfbs,
    Ga(GaParams),
}

impl FsStrategy {
    pub fn id(&self) -> String {
        match self {
            FsStrategy::None => "none".into(),
            FsStrategy::Sffs => "sffs".into(),
            FsStrategy::Sfbs => "sfbs".into(),
            FsStrategy::Ga(g) => format!("ga{}+{}", g.mu, g.lambda),
        }
    }

    pub fn run(
        &self,
        data: &Dataset,
        paradigm: Paradigm,
        learner: &LearnerConfig,
        seed: u64,
        cost: CostModel,
    ) -> Result<FsOutcome> {
        let eval = Evaluator::new(data, paradigm, learner, seed, cost);
        match self {
            FsStrategy::None => {
                let mask = data.full_mask();
                let score = eval.score(&mask)?;
                Ok(FsOutcome::finish(self.id(), mask, score, &eval, Vec::new(), Vec::new()))
            }
            FsStrategy::Sffs => sffs_with(&eval, DEFAULT_TOL),
            FsStrategy::Sfbs => sfbs_with(&eval, DEFAULT_TOL),
            FsStrategy::Ga(g) => ga_with(&eval, g, rng::derive_seed(seed, &[0x6a])),
        }
    }
}

impl fmt::Display for FsStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for FsStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(FsStrategy::None),
            "sffs" => Ok(FsStrategy::Sffs),
            "sfbs" => Ok(FsStrategy::Sfbs),
            "ga10+5" | "ga" => Ok(FsStrategy::Ga(GaParams::with_lambda(5))),
            "ga10+50" => Ok(FsStrategy::Ga(GaParams::with_lambda(50))),
            other => Err(Error::InvalidArgument(format!(
                "unknown feature selection {other:?} (available: none, sffs, sfbs, ga10+5, ga10+50)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Add,
    Remove,
    Start,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsStep {
    pub kind: StepKind,
    pub feature: Option<usize>,
    pub score: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsOutcome {
    pub strategy: String,
    pub mask: Vec<bool>,
    pub score: f64,
    /// Distinct masks cross-validated.
    pub evaluations: usize,
    /// Accepted steps of the floating searches.
    pub steps: Vec<FsStep>,
    /// Best score after initialisation and after each generation of the GA.
    pub history: Vec<f64>,
}

impl FsOutcome {
    fn finish(strategy: String, mask: Vec<bool>, score: f64, eval: &Evaluator, steps: Vec<FsStep>, history: Vec<f64>) -> Self {
        FsOutcome { strategy, mask, score, evaluations: eval.evaluations(), steps, history }
    }
}

/// Memoised cross-validation score of a feature mask.
pub struct Evaluator<'a> {
    data: &'a Dataset,
    paradigm: Paradigm,
    learner: LearnerConfig,
    seed: u64,
    cost: CostModel,
    cache: Mutex<HashMap<Vec<bool>, f64>>,
    count: AtomicUsize,
}

impl<'a> Evaluator<'a> {
    pub fn new(data: &'a Dataset, paradigm: Paradigm, learner: &LearnerConfig, seed: u64, cost: CostModel) -> Self {
        Evaluator {
            data,
            paradigm,
            learner: *learner,
            seed,
            cost,
            cache: Mutex::new(HashMap::new()),
            count: AtomicUsize::new(0),
        }
    }

    pub fn n_features(&self) -> usize {
        self.data.n_features()
    }

    pub fn score(&self, mask: &[bool]) -> Result<f64> {
        if let Some(&s) = self.cache.lock().expect("cache lock").get(mask) {
            return Ok(s);
        }
        let s = lofo_cv(self.data, self.paradigm, &self.learner, mask, self.seed, self.cost)?.mean_relert;
        let mut cache = self.cache.lock().expect("cache lock");
        if cache.insert(mask.to_vec(), s).is_none() {
            self.count.fetch_add(1, Ordering::Relaxed);
        }
        Ok(s)
    }

    pub fn evaluations(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }

    /// Scores the masks obtained by flipping each candidate bit; returns the
    /// best `(score, bit)`, the lowest bit on ties.
    fn best_flip(&self, mask: &[bool], candidates: &[usize]) -> Result<Option<(f64, usize)>> {
        let scored = candidates
            .par_iter()
            .map(|&j| {
                let mut m = mask.to_vec();
                m[j] = !m[j];
                self.score(&m).map(|s| (s, j))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(scored.into_iter().fold(None, |best: Option<(f64, usize)>, c| match best {
            Some(b) if b.0 <= c.0 => Some(b),
            _ => Some(c),
        }))
    }
}

fn size(mask: &[bool]) -> usize {
    mask.iter().filter(|&&b| b).count()
}

fn on_bits(mask: &[bool], value: bool) -> Vec<usize> {
    (0..mask.len()).filter(|&j| mask[j] == value).collect()
}

/// Tries removals while they improve by more than `tol`; never empties the mask.
fn float_remove(eval: &Evaluator, mask: &mut [bool], score: &mut f64, steps: &mut Vec<FsStep>, tol: f64) -> Result<()> {
    while size(mask) > 1 {
        match eval.best_flip(mask, &on_bits(mask, true))? {
            Some((s, j)) if s < *score - tol => {
                mask[j] = false;
                *score = s;
                steps.push(FsStep { kind: StepKind::Remove, feature: Some(j), score: s, size: size(mask) });
            }
            _ => break,
        }
    }
    Ok(())
}

fn float_add(eval: &Evaluator, mask: &mut [bool], score: &mut f64, steps: &mut Vec<FsStep>, tol: f64) -> Result<()> {
    loop {
        let off = on_bits(mask, false);
        if off.is_empty() {
            break;
        }
        match eval.best_flip(mask, &off)? {
            Some((s, j)) if s < *score - tol => {
                mask[j] = true;
                *score = s;
                steps.push(FsStep { kind: StepKind::Add, feature: Some(j), score: s, size: size(mask) });
            }
            _ => break,
        }
    }
    Ok(())
}

pub fn sffs_with(eval: &Evaluator, tol: f64) -> Result<FsOutcome> {
    let p = eval.n_features();
    if p == 0 {
        return Err(Error::InvalidArgument("feature selection needs at least one feature".into()));
    }
    let mut mask = vec![false; p];
    let mut score = f64::INFINITY;
    let mut steps = Vec::new();
    loop {
        let off = on_bits(&mask, false);
        if off.is_empty() {
            break;
        }
        let Some((s, j)) = eval.best_flip(&mask, &off)? else { break };
        if !(s < score - tol) {
            break;
        }
        mask[j] = true;
        score = s;
        steps.push(FsStep { kind: StepKind::Add, feature: Some(j), score: s, size: size(&mask) });
        float_remove(eval, &mut mask, &mut score, &mut steps, tol)?;
    }
    Ok(FsOutcome::finish("sffs".into(), mask, score, eval, steps, Vec::new()))
}

pub fn sfbs_with(eval: &Evaluator, tol: f64) -> Result<FsOutcome> {
    let p = eval.n_features();
    if p == 0 {
        return Err(Error::InvalidArgument("feature selection needs at least one feature".into()));
    }
    let mut mask = vec![true; p];
    let mut score = eval.score(&mask)?;
    let mut steps = vec![FsStep { kind: StepKind::Start, feature: None, score, size: p }];
    while size(&mask) > 1 {
        let Some((s, j)) = eval.best_flip(&mask, &on_bits(&mask, true))? else { break };
        if !(s < score - tol) {
            break;
        }
        mask[j] = false;
        score = s;
        steps.push(FsStep { kind: StepKind::Remove, feature: Some(j), score: s, size: size(&mask) });
        float_add(eval, &mut mask, &mut score, &mut steps, tol)?;
    }
    Ok(FsOutcome::finish("sfbs".into(), mask, score, eval, steps, Vec::new()))
}

fn repair(mask: &mut [bool], r: &mut rng::Rng) {
    if !mask.iter().any(|&b| b) {
        let j = r.random_range(0..mask.len());
        mask[j] = true;
    }
}

pub fn ga_with(eval: &Evaluator, params: &GaParams, seed: u64) -> Result<FsOutcome> {
    let p = eval.n_features();
    if p == 0 || params.mu == 0 {
        return Err(Error::InvalidArgument("genetic search needs p >= 1 and mu >= 1".into()));
    }
    let mut r = rng::rng(seed);
    let init: Vec<Vec<bool>> = (0..params.mu)
        .map(|_| {
            let mut m: Vec<bool> = (0..p).map(|_| r.random_bool(0.5)).collect();
            repair(&mut m, &mut r);
            m
        })
        .collect();
    let scores = init.par_iter().map(|m| eval.score(m)).collect::<Result<Vec<f64>>>()?;
    let mut pop: Vec<(f64, Vec<bool>)> = scores.into_iter().zip(init).collect();
    pop.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut history = vec![pop[0].0];
    for _ in 0..params.generations {
        let mut offspring = Vec::with_capacity(params.lambda);
        for _ in 0..params.lambda {
            let a = &pop[r.random_range(0..pop.len())].1;
            let b = &pop[r.random_range(0..pop.len())].1;
            let mut child = if r.random_bool(params.crossover_rate) {
                a.iter().zip(b).map(|(&x, &y)| if r.random_bool(0.5) { x } else { y }).collect()
            } else {
                a.clone()
            };
            for bit in child.iter_mut() {
                if r.random_bool(params.mutation_rate) {
                    *bit = !*bit;
                }
            }
            repair(&mut child, &mut r);
            offspring.push(child);
        }
        let scores = offspring.par_iter().map(|m| eval.score(m)).collect::<Result<Vec<f64>>>()?;
        pop.extend(scores.into_iter().zip(offspring));
        pop.sort_by(|a, b| a.0.total_cmp(&b.0));
        pop.truncate(params.mu);
        history.push(pop[0].0);
    }
    let (score, mask) = pop.swap_remove(0);
    Ok(FsOutcome::finish(format!("ga{}+{}", params.mu, params.lambda), mask, score, eval, Vec::new(), history))
}

pub fn sffs(data: &Dataset, paradigm: Paradigm, learner: &LearnerConfig, seed: u64, cost: CostModel) -> Result<FsOutcome> {
    FsStrategy::Sffs.run(data, paradigm, learner, seed, cost)
}

pub fn sfbs(data: &Dataset, paradigm: Paradigm, learner: &LearnerConfig, seed: u64, cost: CostModel) -> Result<FsOutcome> {
    FsStrategy::Sfbs.run(data, paradigm, learner, seed, cost)
}

pub fn ga_fs(
    data: &Dataset,
    paradigm: Paradigm,
    learner: &LearnerConfig,
    params: GaParams,
    seed: u64,
    cost: CostModel,
) -> Result<FsOutcome> {
    FsStrategy::Ga(params).run(data, paradigm, learner, seed, cost)
}
