//! Expected runtime, relative ERT with PAR10 imputation, VBS/SBS baselines and
//! portfolio construction.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::RunRecord;
use crate::key::ProblemKey;

pub const DEFAULT_EPSILON: f64 = 1e-2;
pub const PENALTY_FACTOR: f64 = 10.0;

/// Success means a gap within `[0, epsilon]`.
pub fn success(record: &RunRecord, epsilon: f64) -> bool {
    record.best_gap <= epsilon
}

/// Sum of evaluations over all runs divided by the number of successful
/// runs; `None` without a success.
pub fn ert<'a>(records: impl IntoIterator<Item = &'a RunRecord>, epsilon: f64) -> Option<f64> {
    let mut fes: u64 = 0;
    let mut succ: u64 = 0;
    for r in records {
        fes += r.fe_count;
        succ += success(r, epsilon) as u64;
    }
    if succ == 0 {
        None
    } else {
        Some(fes as f64 / succ as f64)
    }
}

/// Solvers x problems. Undefined ERTs are stored as `+inf`; their relERT is
/// the penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceTable {
    pub solvers: Vec<String>,
    pub problems: Vec<ProblemKey>,
    pub ert: Vec<Vec<f64>>,
    pub relert: Vec<Vec<f64>>,
    pub epsilon: f64,
    pub penalty: f64,
    /// Problems without any successful solver.
    pub dropped: Vec<ProblemKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub epsilon: f64,
    pub penalty: f64,
    pub penalty_factor: f64,
    pub solvers: Vec<String>,
    pub problems: Vec<String>,
    pub dropped: Vec<String>,
    pub imputed_entries: usize,
}

impl PerformanceTable {
    /// Builds relERT from an ERT matrix (`inf` or NaN = undefined).
    pub fn from_ert(
        solvers: Vec<String>,
        problems: Vec<ProblemKey>,
        ert: Vec<Vec<f64>>,
        epsilon: f64,
    ) -> Result<Self> {
        if solvers.is_empty() {
            return Err(Error::InvalidArgument("performance table needs at least one solver".into()));
        }
        if ert.len() != solvers.len() || ert.iter().any(|row| row.len() != problems.len()) {
            return Err(Error::InvalidArgument("ERT matrix shape does not match solvers x problems".into()));
        }
        let unique: BTreeSet<&String> = solvers.iter().collect();
        if unique.len() != solvers.len() {
            return Err(Error::InvalidArgument("duplicate solver id".into()));
        }
        let defined = |v: f64| v.is_finite() && v > 0.0;
        let mut keep = Vec::new();
        let mut dropped = Vec::new();
        for (j, p) in problems.iter().enumerate() {
            if ert.iter().any(|row| defined(row[j])) {
                keep.push(j);
            } else {
                log::warn!("problem {p} dropped: no solver reached the target precision");
                dropped.push(*p);
            }
        }
        let problems_kept: Vec<ProblemKey> = keep.iter().map(|&j| problems[j]).collect();
        let ert_kept: Vec<Vec<f64>> = ert
            .iter()
            .map(|row| keep.iter().map(|&j| if defined(row[j]) { row[j] } else { f64::INFINITY }).collect())
            .collect();
        let best: Vec<f64> = (0..keep.len())
            .map(|j| ert_kept.iter().map(|row| row[j]).fold(f64::INFINITY, f64::min))
            .collect();
        let mut relert: Vec<Vec<f64>> =
            ert_kept.iter().map(|row| row.iter().zip(&best).map(|(e, b)| e / b).collect()).collect();
        let max_finite = relert.iter().flatten().copied().filter(|v| v.is_finite()).fold(1.0, f64::max);
        let penalty = PENALTY_FACTOR * max_finite;
        for v in relert.iter_mut().flatten() {
            if !v.is_finite() {
                *v = penalty;
            }
        }
        Ok(PerformanceTable { solvers, problems: problems_kept, ert: ert_kept, relert, epsilon, penalty, dropped })
    }

    pub fn n_solvers(&self) -> usize {
        self.solvers.len()
    }

    pub fn n_problems(&self) -> usize {
        self.problems.len()
    }

    pub fn solver_index(&self, solver: &str) -> Option<usize> {
        self.solvers.iter().position(|s| s == solver)
    }

    pub fn problem_index(&self, p: ProblemKey) -> Option<usize> {
        self.problems.iter().position(|q| *q == p)
    }

    pub fn is_imputed(&self, s: usize, p: usize) -> bool {
        !self.ert[s][p].is_finite()
    }

    /// Best (smallest) ERT of a problem column.
    pub fn best_ert(&self, p: usize) -> f64 {
        self.ert.iter().map(|row| row[p]).fold(f64::INFINITY, f64::min)
    }

    pub fn relert_column(&self, p: usize) -> Vec<f64> {
        self.relert.iter().map(|row| row[p]).collect()
    }

    pub fn mean_relert(&self, s: usize) -> f64 {
        self.relert[s].iter().sum::<f64>() / self.problems.len() as f64
    }

    /// Mean relERT of solver `s` over the given problem columns.
    pub fn mean_relert_over(&self, s: usize, problems: &[usize]) -> f64 {
        problems.iter().map(|&p| self.relert[s][p]).sum::<f64>() / problems.len() as f64
    }

    /// The same table restricted to `solvers` (in that order), renormalised
    /// against the best of the remaining solvers.
    pub fn restrict(&self, solvers: &[String]) -> Result<Self> {
        let mut ert = Vec::with_capacity(solvers.len());
        for s in solvers {
            let i = self
                .solver_index(s)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown solver {s}")))?;
            ert.push(self.ert[i].clone());
        }
        let mut t = PerformanceTable::from_ert(solvers.to_vec(), self.problems.clone(), ert, self.epsilon)?;
        let mut dropped = self.dropped.clone();
        dropped.extend(t.dropped.iter().copied());
        dropped.sort();
        t.dropped = dropped;
        Ok(t)
    }

    pub fn meta(&self) -> TableMeta {
        TableMeta {
            epsilon: self.epsilon,
            penalty: self.penalty,
            penalty_factor: PENALTY_FACTOR,
            solvers: self.solvers.clone(),
            problems: self.problems.iter().map(ToString::to_string).collect(),
            dropped: self.dropped.iter().map(ToString::to_string).collect(),
            imputed_entries: self.ert.iter().flatten().filter(|v| !v.is_finite()).count(),
        }
    }

    fn write_matrix<W: Write>(&self, m: &[Vec<f64>], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["solver".to_string()];
        header.extend(self.problems.iter().map(ToString::to_string));
        w.write_record(&header)?;
        for (s, row) in self.solvers.iter().zip(m) {
            let mut rec = vec![s.clone()];
            rec.extend(row.iter().map(|v| format!("{v}")));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<performance csv>", e))?;
        Ok(())
    }

    pub fn write_ert_csv<W: Write>(&self, out: W) -> Result<()> {
        self.write_matrix(&self.ert, out)
    }

    pub fn write_relert_csv<W: Write>(&self, out: W) -> Result<()> {
        self.write_matrix(&self.relert, out)
    }

    pub fn write_meta_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.meta())?;
        Ok(())
    }

    /// Rebuilds a table from `ert.csv` and its metadata sidecar; relERT and
    /// the penalty are recomputed and checked against the sidecar.
    pub fn read<R1: Read, R2: Read>(ert_csv: R1, meta_json: R2) -> Result<Self> {
        let (solvers, problems, ert) = read_matrix(ert_csv)?;
        let meta: TableMeta = serde_json::from_reader(meta_json)?;
        let mut t = PerformanceTable::from_ert(solvers, problems, ert, meta.epsilon)?;
        if t.penalty.to_bits() != meta.penalty.to_bits() {
            return Err(Error::SchemaMismatch(format!(
                "penalty in metadata ({}) does not match the ERT table ({})",
                meta.penalty, t.penalty
            )));
        }
        for d in &meta.dropped {
            let key: ProblemKey = d.parse().map_err(Error::SchemaMismatch)?;
            if !t.dropped.contains(&key) {
                t.dropped.push(key);
            }
        }
        t.dropped.sort();
        Ok(t)
    }
}

/// Reads a `solver,fid:dim,...` matrix.
pub fn read_matrix<R: Read>(input: R) -> Result<(Vec<String>, Vec<ProblemKey>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.get(0) != Some("solver") {
        return Err(Error::Parse { line: 1, message: "first column must be `solver`".into() });
    }
    let problems = header
        .iter()
        .skip(1)
        .map(|h| h.parse::<ProblemKey>().map_err(|message| Error::Parse { line: 1, message }))
        .collect::<Result<Vec<_>>>()?;
    let mut solvers = Vec::new();
    let mut m = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        solvers.push(rec.get(0).unwrap_or("").to_string());
        let row = rec
            .iter()
            .skip(1)
            .map(|v| {
                v.trim().parse::<f64>().map_err(|e| Error::Parse { line, message: format!("{v:?}: {e}") })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != problems.len() {
            return Err(Error::Parse { line, message: "row length does not match header".into() });
        }
        m.push(row);
    }
    Ok((solvers, problems, m))
}

/// ERT table for `solvers` (all solvers in the records when `None`).
/// A solver without records on a problem is treated as never successful.
pub fn relert_table(records: &[RunRecord], solvers: Option<&[String]>, epsilon: f64) -> Result<PerformanceTable> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let solvers: Vec<String> = match solvers {
        Some(s) => s.to_vec(),
        None => records.iter().map(|r| r.solver.clone()).collect::<BTreeSet<_>>().into_iter().collect(),
    };
    let wanted: BTreeSet<&str> = solvers.iter().map(String::as_str).collect();
    let mut groups: BTreeMap<(&str, ProblemKey), Vec<&RunRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| wanted.contains(r.solver.as_str())) {
        groups.entry((r.solver.as_str(), r.problem())).or_default().push(r);
    }
    let problems: Vec<ProblemKey> =
        groups.keys().map(|(_, p)| *p).collect::<BTreeSet<_>>().into_iter().collect();
    let mut ert_m = vec![vec![f64::INFINITY; problems.len()]; solvers.len()];
    for (i, s) in solvers.iter().enumerate() {
        for (j, p) in problems.iter().enumerate() {
            match groups.get(&(s.as_str(), *p)) {
                Some(g) => {
                    if let Some(v) = ert(g.iter().copied(), epsilon) {
                        ert_m[i][j] = v;
                    }
                }
                None => log::warn!("solver {s} has no runs on problem {p}; treated as unsuccessful"),
            }
        }
    }
    PerformanceTable::from_ert(solvers, problems, ert_m, epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub best: BTreeMap<ProblemKey, String>,
    pub mean_relert: f64,
}

/// Per-problem best solver; ties go to the earlier solver.
pub fn vbs(table: &PerformanceTable) -> Baseline {
    let mut best = BTreeMap::new();
    let mut total = 0.0;
    for (j, p) in table.problems.iter().enumerate() {
        let mut b = 0;
        for s in 1..table.n_solvers() {
            if table.relert[s][j] < table.relert[b][j] {
                b = s;
            }
        }
        total += table.relert[b][j];
        best.insert(*p, table.solvers[b].clone());
    }
    Baseline { best, mean_relert: total / table.n_problems() as f64 }
}

/// Solver with the lowest mean relERT; ties go to the earlier solver.
pub fn sbs(table: &PerformanceTable) -> (String, f64) {
    let all: Vec<usize> = (0..table.n_problems()).collect();
    let (i, m) = sbs_over(table, &all);
    (table.solvers[i].clone(), m)
}

/// SBS index and mean relERT over a subset of problem columns.
pub fn sbs_over(table: &PerformanceTable, problems: &[usize]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for s in 0..table.n_solvers() {
        let m = table.mean_relert_over(s, problems);
        if m < best.1 {
            best = (s, m);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portfolio {
    pub members: Vec<String>,
    pub per_dim_sets: BTreeMap<u32, BTreeSet<String>>,
    pub best_per_problem: BTreeMap<ProblemKey, String>,
    pub top_k: usize,
}

/// Competition ranks ("1224") of a column; undefined entries get `None`.
pub fn competition_ranks(values: &[f64]) -> Vec<Option<usize>> {
    values
        .iter()
        .map(|&v| {
            if v.is_finite() {
                Some(1 + values.iter().filter(|&&w| w.is_finite() && w < v).count())
            } else {
                None
            }
        })
        .collect()
}

/// Solvers ranked within the top `top_k` of at least one function, per
/// dimension, intersected across dimensions.
pub fn build_portfolio(table: &PerformanceTable, top_k: usize) -> Result<Portfolio> {
    let mut per_dim_sets: BTreeMap<u32, BTreeSet<String>> = BTreeMap::new();
    for (j, p) in table.problems.iter().enumerate() {
        let col: Vec<f64> = table.ert.iter().map(|row| row[j]).collect();
        let set = per_dim_sets.entry(p.dim).or_default();
        for (s, r) in competition_ranks(&col).into_iter().enumerate() {
            if r.is_some_and(|r| r <= top_k) {
                set.insert(table.solvers[s].clone());
            }
        }
    }
    let mut iter = per_dim_sets.values();
    let mut common: BTreeSet<String> = iter.next().cloned().unwrap_or_default();
    for s in iter {
        common = common.intersection(s).cloned().collect();
    }
    if common.is_empty() {
        return Err(Error::EmptyPortfolio(per_dim_sets));
    }
    let mut members: Vec<(f64, String)> = common
        .into_iter()
        .map(|s| (table.mean_relert(table.solver_index(&s).expect("member comes from the table")), s))
        .collect();
    members.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let members: Vec<String> = members.into_iter().map(|(_, s)| s).collect();
    let best_per_problem = vbs(&table.restrict(&members)?).best;
    Ok(Portfolio { members, per_dim_sets, best_per_problem, top_k })
}
