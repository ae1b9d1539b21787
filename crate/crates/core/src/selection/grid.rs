//! Cartesian grid of learners, paradigms and feature-selection strategies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fs::FsStrategy;
use super::{lofo_cv, CostModel, CvResult, Dataset, LearnerConfig, Paradigm};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub learner: LearnerConfig,
    pub paradigm: Paradigm,
    pub strategy: FsStrategy,
    pub seed: u64,
    pub mask: Vec<bool>,
    pub fs_evaluations: usize,
    pub cv: Option<CvResult>,
    pub error: Option<String>,
}

impl GridEntry {
    /// Cost-inclusive mean relERT; failures rank last.
    pub fn score(&self) -> f64 {
        self.cv.as_ref().map_or(f64::INFINITY, |c| c.mean_relert)
    }

    pub fn name(&self) -> String {
        format!("{}/{}/{}", self.learner.id(), self.paradigm.id(), self.strategy.id())
    }
}

fn run_cell(
    data: &Dataset,
    learner: &LearnerConfig,
    paradigm: Paradigm,
    strategy: &FsStrategy,
    seed: u64,
    cost: CostModel,
) -> Result<(Vec<bool>, usize, CvResult)> {
    let out = strategy.run(data, paradigm, learner, seed, cost)?;
    let cv = lofo_cv(data, paradigm, learner, &out.mask, seed, cost)?;
    Ok((out.mask, out.evaluations, cv))
}

/// Evaluates every combination and returns them ranked by cost-inclusive
/// mean relERT (ties keep grid order). Failing cells are kept with their
/// error message.
pub fn grid_search(
    data: &Dataset,
    learners: &[LearnerConfig],
    paradigms: &[Paradigm],
    strategies: &[FsStrategy],
    seed: u64,
    cost: CostModel,
) -> Result<Vec<GridEntry>> {
    if learners.is_empty() || paradigms.is_empty() || strategies.is_empty() {
        return Err(Error::InvalidArgument("grid search needs at least one learner, paradigm and strategy".into()));
    }
    let mut cells = Vec::new();
    for (li, l) in learners.iter().enumerate() {
        for (pi, p) in paradigms.iter().enumerate() {
            for (si, s) in strategies.iter().enumerate() {
                cells.push((*l, *p, *s, rng::derive_seed(seed, &[li as u64, pi as u64, si as u64])));
            }
        }
    }
    let mut entries: Vec<GridEntry> = cells
        .into_par_iter()
        .map(|(learner, paradigm, strategy, cell_seed)| {
            match run_cell(data, &learner, paradigm, &strategy, cell_seed, cost) {
                Ok((mask, fs_evaluations, cv)) => GridEntry {
                    learner,
                    paradigm,
                    strategy,
                    seed: cell_seed,
                    mask,
                    fs_evaluations,
                    cv: Some(cv),
                    error: None,
                },
                Err(e) => {
                    log::warn!("grid cell {}/{}/{} failed: {e}", learner.id(), paradigm.id(), strategy.id());
                    GridEntry {
                        learner,
                        paradigm,
                        strategy,
                        seed: cell_seed,
                        mask: Vec::new(),
                        fs_evaluations: 0,
                        cv: None,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect();
    entries.sort_by(|a, b| a.score().total_cmp(&b.score()));
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::key::ProblemKey;
    use crate::performance::PerformanceTable;

    #[test]
    fn grid_is_complete_and_ranked() {
        let problems: Vec<ProblemKey> = (1..=6).map(|f| ProblemKey::new(f, 3)).collect();
        let ert = vec![
            vec![10.0, 20.0, 10.0, 20.0, 10.0, 20.0],
            vec![20.0, 10.0, 20.0, 10.0, 20.0, 10.0],
        ];
        let table = PerformanceTable::from_ert(vec!["A".into(), "B".into()], problems, ert, 1e-2).unwrap();
        let x = (0..6).map(|j| vec![(j % 2) as f64, j as f64]).collect();
        let data = Dataset::from_parts(vec!["a".into(), "b".into()], x, table).unwrap();
        let learners: Vec<LearnerConfig> = vec!["tree".parse().unwrap(), "knn".parse().unwrap()];
        let strategies = [FsStrategy::None, FsStrategy::Sffs];
        let g = grid_search(&data, &learners, &Paradigm::ALL, &strategies, 0, CostModel::FREE).unwrap();
        assert_eq!(g.len(), 12);
        assert!(g.windows(2).all(|w| w[0].score() <= w[1].score()));
        let one = grid_search(&data, &learners[..1], &Paradigm::ALL[..1], &strategies[..1], 0, CostModel::FREE).unwrap();
        assert_eq!(one.len(), 1);
    }
}
