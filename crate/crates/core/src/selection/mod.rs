//! Algorithm selectors: three paradigms over pluggable learners, evaluated by
//! leave-one-problem-out cross-validation with feature-cost accounting.
//!
//! Sign convention of the pairwise paradigm: the model for the pair `(i, j)`
//! with `i < j` predicts `log10 relERT_i - log10 relERT_j`, so a positive
//! prediction means solver `i` is worse. Each solver scores the sum of the
//! predicted amounts by which its opponents are worse, and the highest score
//! wins.

pub mod fs;
pub mod grid;
pub mod learner;
pub mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::key::ProblemKey;
use crate::performance::{vbs, PerformanceTable};
use crate::rng;

pub use fs::{ga_fs, sfbs, sffs, FsOutcome, FsStrategy, GaParams};
pub use grid::{grid_search, GridEntry};
pub use learner::{Fitted, Learner, LearnerConfig, Target};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Paradigm {
    Classification,
    Regression,
    Pairwise,
}

impl Paradigm {
    pub const ALL: [Paradigm; 3] = [Paradigm::Classification, Paradigm::Regression, Paradigm::Pairwise];

    pub fn id(self) -> &'static str {
        match self {
            Paradigm::Classification => "classification",
            Paradigm::Regression => "regression",
            Paradigm::Pairwise => "pairwise",
        }
    }

    /// Number of fitted models for a portfolio of `solvers`.
    pub fn model_count(self, solvers: usize) -> usize {
        match self {
            Paradigm::Classification => 1,
            Paradigm::Regression => solvers,
            Paradigm::Pairwise => solvers * solvers.saturating_sub(1) / 2,
        }
    }
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Paradigm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "classification" => Ok(Paradigm::Classification),
            "regression" => Ok(Paradigm::Regression),
            "pairwise" | "pairwise-regression" | "pairwise_regression" => Ok(Paradigm::Pairwise),
            other => Err(Error::InvalidArgument(format!(
                "unknown paradigm {other:?} (available: classification, regression, pairwise)"
            ))),
        }
    }
}

/// Evaluations charged for computing the features of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub evals_per_dim: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { evals_per_dim: 50.0 }
    }
}

impl CostModel {
    pub const FREE: CostModel = CostModel { evals_per_dim: 0.0 };

    pub fn evals(&self, p: ProblemKey) -> f64 {
        self.evals_per_dim * p.dim as f64
    }
}

/// Feature rows aligned with the problem columns of a performance table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub table: PerformanceTable,
}

impl Dataset {
    /// Aligns per-problem feature rows with the table. Rows for problems the
    /// table dropped are ignored; any other orphan is an error.
    pub fn new(features: &FeatureMatrix, table: &PerformanceTable) -> Result<Self> {
        if features.is_per_instance() {
            return Err(Error::InvalidArgument(
                "selectors need one feature row per problem; aggregate instances first".into(),
            ));
        }
        let mut rows: BTreeMap<ProblemKey, &Vec<f64>> = BTreeMap::new();
        for r in &features.rows {
            rows.insert(r.key.problem, &r.values);
        }
        let without_features: Vec<ProblemKey> =
            table.problems.iter().filter(|p| !rows.contains_key(p)).copied().collect();
        let without_performance: Vec<ProblemKey> = rows
            .keys()
            .filter(|p| !table.problems.contains(p) && !table.dropped.contains(p))
            .copied()
            .collect();
        if !without_features.is_empty() || !without_performance.is_empty() {
            return Err(Error::Alignment { without_performance, without_features });
        }
        let x = table.problems.iter().map(|p| rows[p].clone()).collect();
        Dataset::from_parts(features.names.clone(), x, table.clone())
    }

    pub fn from_parts(names: Vec<String>, x: Vec<Vec<f64>>, table: PerformanceTable) -> Result<Self> {
        if x.len() != table.n_problems() {
            return Err(Error::InvalidArgument(format!(
                "{} feature rows for {} problems",
                x.len(),
                table.n_problems()
            )));
        }
        if let Some(bad) = x.iter().find(|r| r.len() != names.len()) {
            return Err(Error::SchemaMismatch(format!(
                "feature row has {} values for {} names",
                bad.len(),
                names.len()
            )));
        }
        Ok(Dataset { names, x, table })
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn problems(&self) -> &[ProblemKey] {
        &self.table.problems
    }

    pub fn full_mask(&self) -> Vec<bool> {
        vec![true; self.n_features()]
    }

    /// Training subset without problem column `held_out`; the relERT of the
    /// subset, including its penalty, is computed from its own columns.
    pub fn without(&self, held_out: usize) -> Result<Dataset> {
        let keep: Vec<usize> = (0..self.table.n_problems()).filter(|&j| j != held_out).collect();
        let problems = keep.iter().map(|&j| self.table.problems[j]).collect();
        let ert = self.table.ert.iter().map(|row| keep.iter().map(|&j| row[j]).collect()).collect();
        let table = PerformanceTable::from_ert(self.table.solvers.clone(), problems, ert, self.table.epsilon)?;
        let x = keep.iter().map(|&j| self.x[j].clone()).collect();
        Dataset::from_parts(self.names.clone(), x, table)
    }
}

/// Hex SHA-256 of the feature names, one per line.
pub fn schema_hash(names: &[String]) -> String {
    let mut h = Sha256::new();
    for n in names {
        h.update(n.as_bytes());
        h.update(b"\n");
    }
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Best solver per problem; exact ties are broken by a uniform draw seeded
/// from `seed` and the problem key.
pub fn label_best(table: &PerformanceTable, seed: u64) -> BTreeMap<ProblemKey, String> {
    label_indices(table, seed)
        .into_iter()
        .zip(&table.problems)
        .map(|(s, p)| (*p, table.solvers[s].clone()))
        .collect()
}

fn label_indices(table: &PerformanceTable, seed: u64) -> Vec<usize> {
    (0..table.n_problems())
        .map(|j| {
            let col = table.relert_column(j);
            let min = col.iter().copied().fold(f64::INFINITY, f64::min);
            let tied: Vec<usize> = (0..col.len()).filter(|&s| col[s] == min).collect();
            if tied.len() == 1 {
                tied[0]
            } else {
                let p = table.problems[j];
                let mut r = rng::rng(rng::derive_seed(seed, &[p.fid as u64, p.dim as u64]));
                tied[r.random_range(0..tied.len())]
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorModel {
    pub format_version: u32,
    pub paradigm: Paradigm,
    pub learner: LearnerConfig,
    pub feature_names: Vec<String>,
    pub schema_hash: String,
    pub selected_features: Vec<bool>,
    /// Training medians of the selected features, used for NaN imputation.
    pub medians: Vec<f64>,
    pub solvers: Vec<String>,
    pub pairs: Vec<(usize, usize)>,
    pub fitted: Vec<Fitted>,
    /// Set when the training labels had a single class.
    pub fallback: bool,
    pub label: String,
    pub seed: u64,
}

fn check_mask(mask: &[bool], p: usize) -> Result<Vec<usize>> {
    if mask.len() != p {
        return Err(Error::InvalidArgument(format!("mask has {} bits for {p} features", mask.len())));
    }
    let cols: Vec<usize> = (0..p).filter(|&j| mask[j]).collect();
    if cols.is_empty() {
        return Err(Error::InvalidArgument("feature mask selects no feature".into()));
    }
    Ok(cols)
}

fn column_medians(x: &[Vec<f64>], cols: &[usize]) -> Vec<f64> {
    cols.iter()
        .map(|&j| {
            let col: Vec<f64> = x.iter().map(|r| r[j]).collect();
            let m = crate::features::stats::median(&col);
            if m.is_nan() {
                0.0
            } else {
                m
            }
        })
        .collect()
}

fn project(row: &[f64], cols: &[usize], medians: &[f64]) -> Vec<f64> {
    cols.iter()
        .zip(medians)
        .map(|(&j, &m)| if row[j].is_nan() { m } else { row[j] })
        .collect()
}

/// Fits a selector on all problems of `data`.
pub fn train(
    data: &Dataset,
    paradigm: Paradigm,
    learner: &LearnerConfig,
    mask: &[bool],
    seed: u64,
) -> Result<SelectorModel> {
    let cols = check_mask(mask, data.n_features())?;
    let medians = column_medians(&data.x, &cols);
    let x: Vec<Vec<f64>> = data.x.iter().map(|r| project(r, &cols, &medians)).collect();
    let table = &data.table;
    let n_solvers = table.n_solvers();
    let l = learner.learner();
    let log_relert: Vec<Vec<f64>> =
        table.relert.iter().map(|row| row.iter().map(|v| v.log10()).collect()).collect();
    let mut pairs = Vec::new();
    let mut fallback = false;
    let fitted = match paradigm {
        Paradigm::Classification => {
            let labels = label_indices(table, seed);
            let target = Target::Classes { labels: &labels, n_classes: n_solvers };
            if labels.iter().all(|&c| c == labels[0]) {
                fallback = true;
                vec![learner::constant_fit(&target)]
            } else {
                vec![l.fit(&x, &target, rng::derive_seed(seed, &[0]))?]
            }
        }
        Paradigm::Regression => (0..n_solvers)
            .map(|s| l.fit(&x, &Target::Values(&log_relert[s]), rng::derive_seed(seed, &[1, s as u64])))
            .collect::<Result<Vec<_>>>()?,
        Paradigm::Pairwise => {
            for i in 0..n_solvers {
                for j in i + 1..n_solvers {
                    pairs.push((i, j));
                }
            }
            pairs
                .iter()
                .map(|&(i, j)| {
                    let y: Vec<f64> = log_relert[i].iter().zip(&log_relert[j]).map(|(a, b)| a - b).collect();
                    l.fit(&x, &Target::Values(&y), rng::derive_seed(seed, &[2, i as u64, j as u64]))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(SelectorModel {
        format_version: MODEL_FORMAT_VERSION,
        paradigm,
        learner: *learner,
        feature_names: data.names.clone(),
        schema_hash: schema_hash(&data.names),
        selected_features: mask.to_vec(),
        medians,
        solvers: table.solvers.clone(),
        pairs,
        fitted,
        fallback,
        label: format!("{}/{}", learner.id(), paradigm.id()),
        seed,
    })
}

impl SelectorModel {
    pub fn selected_columns(&self) -> Vec<usize> {
        (0..self.selected_features.len()).filter(|&j| self.selected_features[j]).collect()
    }

    /// Index of the chosen solver for a full-schema feature row.
    pub fn predict_index(&self, row: &[f64]) -> Result<usize> {
        if row.len() != self.feature_names.len() {
            return Err(Error::SchemaMismatch(format!(
                "feature row has {} values, model expects {}",
                row.len(),
                self.feature_names.len()
            )));
        }
        let x = project(row, &self.selected_columns(), &self.medians);
        Ok(match self.paradigm {
            Paradigm::Classification => self.fitted[0].predict_class(&x),
            Paradigm::Regression => {
                let scores: Vec<f64> = self.fitted.iter().map(|m| m.predict_value(&x)).collect();
                learner::argmin(&scores)
            }
            Paradigm::Pairwise => {
                let mut score = vec![0.0; self.solvers.len()];
                for (&(i, j), m) in self.pairs.iter().zip(&self.fitted) {
                    let d = m.predict_value(&x);
                    score[j] += d;
                    score[i] -= d;
                }
                learner::argmax(&score)
            }
        })
    }

    pub fn predict(&self, row: &[f64]) -> Result<&str> {
        Ok(&self.solvers[self.predict_index(row)?])
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec(self)?)
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer(out, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        let m: SelectorModel = serde_json::from_reader(input)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::SchemaMismatch(format!(
                "model format version {} (expected {MODEL_FORMAT_VERSION})",
                m.format_version
            )));
        }
        if m.schema_hash != schema_hash(&m.feature_names) {
            return Err(Error::SchemaMismatch("model schema hash does not match its feature names".into()));
        }
        Ok(m)
    }

    /// Hex SHA-256 of the serialized model.
    pub fn hash(&self) -> Result<String> {
        Ok(hex(&Sha256::digest(self.to_json()?)))
    }
}

/// Fitted model of the cross-validation fold that holds out problem `held_out`.
pub fn train_fold(
    data: &Dataset,
    held_out: usize,
    paradigm: Paradigm,
    learner: &LearnerConfig,
    mask: &[bool],
    seed: u64,
) -> Result<SelectorModel> {
    let p = data.table.problems[held_out];
    let train_data = data.without(held_out)?;
    train(&train_data, paradigm, learner, mask, rng::derive_seed(seed, &[p.fid as u64, p.dim as u64]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub problems: Vec<ProblemKey>,
    pub predicted: Vec<String>,
    pub relert_cost: Vec<f64>,
    pub relert_nocost: Vec<f64>,
    pub mean_relert: f64,
    pub mean_relert_no_cost: f64,
}

/// relERT of choosing solver `s` on problem column `p`, charging the
/// feature cost unless the entry is a penalty.
pub fn charged_relert(table: &PerformanceTable, s: usize, p: usize, cost: CostModel) -> f64 {
    if table.is_imputed(s, p) {
        table.penalty
    } else {
        (table.ert[s][p] + cost.evals(table.problems[p])) / table.best_ert(p)
    }
}

impl CvResult {
    /// Scores a per-problem choice of solver indices.
    pub fn from_choices(table: &PerformanceTable, choices: &[usize], cost: CostModel) -> Self {
        let n = table.n_problems();
        let relert_cost: Vec<f64> = (0..n).map(|p| charged_relert(table, choices[p], p, cost)).collect();
        let relert_nocost: Vec<f64> = (0..n).map(|p| table.relert[choices[p]][p]).collect();
        CvResult {
            problems: table.problems.clone(),
            predicted: choices.iter().map(|&s| table.solvers[s].clone()).collect(),
            mean_relert: relert_cost.iter().sum::<f64>() / n as f64,
            mean_relert_no_cost: relert_nocost.iter().sum::<f64>() / n as f64,
            relert_cost,
            relert_nocost,
        }
    }

    pub fn predictions(&self) -> BTreeMap<ProblemKey, String> {
        self.problems.iter().copied().zip(self.predicted.iter().cloned()).collect()
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != ["fid", "dim", "predicted", "relert_cost", "relert_nocost"] {
            return Err(Error::Parse { line: 1, message: format!("unexpected header {}", header.join(",")) });
        }
        let (mut problems, mut predicted, mut cost, mut nocost) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for rec in r.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |m: String| Error::Parse { line, message: m };
            let num = |i: usize| -> Result<f64> { rec[i].trim().parse().map_err(|e| bad(format!("{e}"))) };
            let int = |i: usize| -> Result<u32> { rec[i].trim().parse().map_err(|e| bad(format!("{e}"))) };
            problems.push(ProblemKey::new(int(0)?, int(1)?));
            predicted.push(rec[2].to_string());
            cost.push(num(3)?);
            nocost.push(num(4)?);
        }
        let n = problems.len().max(1) as f64;
        Ok(CvResult {
            problems,
            predicted,
            mean_relert: cost.iter().sum::<f64>() / n,
            mean_relert_no_cost: nocost.iter().sum::<f64>() / n,
            relert_cost: cost,
            relert_nocost: nocost,
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["fid", "dim", "predicted", "relert_cost", "relert_nocost"])?;
        for i in 0..self.problems.len() {
            w.write_record([
                self.problems[i].fid.to_string(),
                self.problems[i].dim.to_string(),
                self.predicted[i].clone(),
                format!("{}", self.relert_cost[i]),
                format!("{}", self.relert_nocost[i]),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<cv csv>", e))?;
        Ok(())
    }
}

/// The virtual best solver scored like a selector.
pub fn oracle_cv(table: &PerformanceTable, cost: CostModel) -> CvResult {
    let best = vbs(table).best;
    let choices: Vec<usize> =
        table.problems.iter().map(|p| table.solver_index(&best[p]).expect("vbs picks a table solver")).collect();
    CvResult::from_choices(table, &choices, cost)
}

/// A selector that always picks `solver`.
pub fn fixed_choice_cv(table: &PerformanceTable, solver: &str, cost: CostModel) -> Result<CvResult> {
    let s = table
        .solver_index(solver)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown solver {solver}")))?;
    Ok(CvResult::from_choices(table, &vec![s; table.n_problems()], cost))
}

/// Leave-one-problem-out cross-validation: one fold per problem.
pub fn lofo_cv(
    data: &Dataset,
    paradigm: Paradigm,
    learner: &LearnerConfig,
    mask: &[bool],
    seed: u64,
    cost: CostModel,
) -> Result<CvResult> {
    let n = data.table.n_problems();
    if n < 2 {
        return Err(Error::InvalidArgument("cross-validation needs at least 2 problems".into()));
    }
    check_mask(mask, data.n_features())?;
    let choices = (0..n)
        .into_par_iter()
        .map(|j| {
            let model = train_fold(data, j, paradigm, learner, mask, seed)?;
            model.predict_index(&data.x[j])
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(CvResult::from_choices(&data.table, &choices, cost))
}

#[cfg(test)]
mod tests {
    use super::learner::KnnParams;
    use super::tree::TreeParams;
    use super::*;

    fn toy() -> Dataset {
        // feature 0 separates the problems where A or B is best
        let problems: Vec<ProblemKey> = (1..=8).map(|f| ProblemKey::new(f, 2)).collect();
        let mut ert = vec![vec![0.0; 8], vec![0.0; 8]];
        let mut x = Vec::new();
        for j in 0..8 {
            let a_best = j % 2 == 0;
            ert[0][j] = if a_best { 100.0 } else { 1000.0 };
            ert[1][j] = if a_best { 800.0 } else { 120.0 };
            x.push(vec![if a_best { 0.0 } else { 1.0 } + 0.01 * j as f64, (j as f64 * 2.1).sin()]);
        }
        let table = PerformanceTable::from_ert(vec!["A".into(), "B".into()], problems, ert, 1e-2).unwrap();
        Dataset::from_parts(vec!["f0".into(), "f1".into()], x, table).unwrap()
    }

    #[test]
    fn separable_labels_are_learned() {
        let data = toy();
        let learner = LearnerConfig::Tree(TreeParams::fully_grown());
        let m = train(&data, Paradigm::Classification, &learner, &[true, true], 0).unwrap();
        let labels = label_best(&data.table, 0);
        for (j, p) in data.problems().iter().enumerate() {
            assert_eq!(m.predict(&data.x[j]).unwrap(), labels[p]);
        }
    }

    #[test]
    fn model_counts_match_paradigm() {
        let data = toy();
        let learner = LearnerConfig::Knn(KnnParams::default());
        for paradigm in Paradigm::ALL {
            let m = train(&data, paradigm, &learner, &[true, false], 0).unwrap();
            assert_eq!(m.fitted.len(), paradigm.model_count(2));
        }
        assert_eq!(Paradigm::Regression.model_count(12), 12);
        assert_eq!(Paradigm::Pairwise.model_count(12), 66);
    }

    #[test]
    fn cv_on_separable_data_finds_the_best() {
        let data = toy();
        for paradigm in Paradigm::ALL {
            let cv = lofo_cv(&data, paradigm, &"knn".parse().unwrap(), &[true, false], 1, CostModel::FREE).unwrap();
            assert_eq!(cv.mean_relert_no_cost, 1.0, "{paradigm}");
        }
    }

    #[test]
    fn cost_is_charged_on_finite_entries() {
        let table = PerformanceTable::from_ert(
            vec!["A".into(), "B".into()],
            vec![ProblemKey::new(1, 2), ProblemKey::new(2, 2)],
            vec![vec![100.0, f64::INFINITY], vec![300.0, 50.0]],
            1e-2,
        )
        .unwrap();
        assert_eq!(charged_relert(&table, 0, 0, CostModel::default()), 2.0);
        assert_eq!(charged_relert(&table, 0, 1, CostModel::default()), table.penalty);
        let oracle = oracle_cv(&table, CostModel::FREE);
        assert_eq!(oracle.mean_relert_no_cost, 1.0);
        let fixed = fixed_choice_cv(&table, "B", CostModel::FREE).unwrap();
        assert_eq!(fixed.mean_relert_no_cost, 2.0);
    }

    #[test]
    fn ties_are_broken_reproducibly() {
        let problems: Vec<ProblemKey> = (1..=40).map(|f| ProblemKey::new(f, 2)).collect();
        let table = PerformanceTable::from_ert(
            vec!["A".into(), "B".into()],
            problems,
            vec![vec![10.0; 40], vec![10.0; 40]],
            1e-2,
        )
        .unwrap();
        let a = label_best(&table, 3);
        assert_eq!(a, label_best(&table, 3));
        let n_a = a.values().filter(|s| *s == "A").count();
        assert!(n_a > 5 && n_a < 35);
    }

    #[test]
    fn single_class_falls_back_to_constant() {
        let table = PerformanceTable::from_ert(
            vec!["A".into(), "B".into()],
            vec![ProblemKey::new(1, 2), ProblemKey::new(2, 2)],
            vec![vec![1.0, 1.0], vec![5.0, 5.0]],
            1e-2,
        )
        .unwrap();
        let data = Dataset::from_parts(vec!["f".into()], vec![vec![0.0], vec![1.0]], table).unwrap();
        let m = train(&data, Paradigm::Classification, &"tree".parse().unwrap(), &[true], 0).unwrap();
        assert!(m.fallback);
        assert_eq!(m.predict(&[100.0]).unwrap(), "A");
    }

    #[test]
    fn pairwise_sign_convention() {
        let data = toy();
        let m = train(&data, Paradigm::Pairwise, &"constant".parse().unwrap(), &[true, true], 0).unwrap();
        // A is better on half the problems by log10(8), B on the rest by log10(1000/120)
        let mean_diff = (8f64.log10() * -1.0 + (1000.0f64 / 120.0).log10()) / 2.0;
        assert!(mean_diff > 0.0);
        assert_eq!(m.predict(&[0.0, 0.0]).unwrap(), "B");
    }

    #[test]
    fn model_json_round_trip() {
        let data = toy();
        let m = train(&data, Paradigm::Regression, &"tree".parse().unwrap(), &[true, true], 4).unwrap();
        let cv = lofo_cv(&data, Paradigm::Regression, &"tree".parse().unwrap(), &[true, true], 4, CostModel::default()).unwrap();
        let mut buf = Vec::new();
        cv.write_csv(&mut buf).unwrap();
        assert_eq!(CvResult::read_csv(buf.as_slice()).unwrap(), cv);
        let bytes = m.to_json().unwrap();
        let back = SelectorModel::read_json(bytes.as_slice()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.hash().unwrap(), m.hash().unwrap());
    }

    #[test]
    fn nan_features_are_imputed() {
        let mut data = toy();
        data.x[0][1] = f64::NAN;
        let m = train(&data, Paradigm::Classification, &"knn".parse().unwrap(), &[true, true], 0).unwrap();
        assert!(m.medians.iter().all(|v| v.is_finite()));
        assert!(m.predict(&[0.0, f64::NAN]).is_ok());
    }
}
