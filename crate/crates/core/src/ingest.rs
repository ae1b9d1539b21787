//! Solver run logs: parsing, serialization and sanity checks.
//!
//! The interchange format is CSV with header
//! `solver,fid,dim,iid,run,fe_count,best_gap` and an optional eighth column
//! `budget_exhausted` (`true`/`false`, `1`/`0`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::key::ProblemKey;

pub const HEADER: [&str; 7] = ["solver", "fid", "dim", "iid", "run", "fe_count", "best_gap"];
const BUDGET_COLUMN: &str = "budget_exhausted";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub solver: String,
    pub fid: u32,
    pub dim: u32,
    pub iid: u32,
    pub run: u32,
    pub fe_count: u64,
    pub best_gap: f64,
    #[serde(default)]
    pub budget_exhausted: bool,
}

impl RunRecord {
    pub fn new(solver: &str, fid: u32, dim: u32, iid: u32, run: u32, fe_count: u64, best_gap: f64) -> Self {
        RunRecord {
            solver: solver.to_string(),
            fid,
            dim,
            iid,
            run,
            fe_count,
            best_gap,
            budget_exhausted: false,
        }
    }

    pub fn problem(&self) -> ProblemKey {
        ProblemKey::new(self.fid, self.dim)
    }

    fn run_key(&self) -> (String, u32, u32, u32, u32) {
        (self.solver.clone(), self.fid, self.dim, self.iid, self.run)
    }
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(i).unwrap_or("").trim();
    raw.parse::<T>().map_err(|e| Error::Parse {
        line,
        message: format!("column {}: cannot parse {raw:?}: {e}", HEADER.get(i).unwrap_or(&BUDGET_COLUMN)),
    })
}

fn parse_bool(raw: &str, line: u64) -> Result<bool> {
    match raw.trim() {
        "true" | "TRUE" | "1" => Ok(true),
        "false" | "FALSE" | "0" | "" => Ok(false),
        other => Err(Error::Parse { line, message: format!("column {BUDGET_COLUMN}: cannot parse {other:?}") }),
    }
}

/// Parses a run CSV. Rejects malformed rows, `fe_count < 1`, negative or
/// non-finite gaps, and duplicate `(solver, fid, dim, iid, run)` keys.
pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut rows = reader.records();
    let header = match rows.next() {
        None => return Ok(Vec::new()),
        Some(h) => h?,
    };
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let with_budget = names.len() == 8 && names[7] == BUDGET_COLUMN;
    if names[..names.len().min(7)] != HEADER[..] || !(names.len() == 7 || with_budget) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {:?}, found {:?}", HEADER.join(","), names.join(",")),
        });
    }
    let width = if with_budget { 8 } else { 7 };
    let mut out = Vec::new();
    let mut seen: BTreeMap<(String, u32, u32, u32, u32), u64> = BTreeMap::new();
    for row in rows {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() == 1 && row.get(0).is_some_and(|s| s.trim().is_empty()) {
            continue;
        }
        if row.len() != width {
            return Err(Error::Parse { line, message: format!("expected {width} fields, found {}", row.len()) });
        }
        let solver = row.get(0).unwrap_or("").trim().to_string();
        if solver.is_empty() {
            return Err(Error::Parse { line, message: "empty solver id".into() });
        }
        let rec = RunRecord {
            solver,
            fid: field(&row, 1, line)?,
            dim: field(&row, 2, line)?,
            iid: field(&row, 3, line)?,
            run: field(&row, 4, line)?,
            fe_count: field(&row, 5, line)?,
            best_gap: field(&row, 6, line)?,
            budget_exhausted: if with_budget { parse_bool(row.get(7).unwrap_or(""), line)? } else { false },
        };
        if rec.fe_count < 1 {
            return Err(Error::Parse { line, message: "fe_count must be at least 1".into() });
        }
        if !(rec.best_gap >= 0.0) || !rec.best_gap.is_finite() {
            return Err(Error::Parse { line, message: format!("best_gap must be finite and >= 0, got {}", rec.best_gap) });
        }
        if rec.dim == 0 {
            return Err(Error::Parse { line, message: "dim must be positive".into() });
        }
        let key = rec.run_key();
        if let Some(&first_line) = seen.get(&key) {
            return Err(Error::DuplicateRecord {
                line,
                first_line,
                key: format!("{},{},{},{},{}", key.0, key.1, key.2, key.3, key.4),
            });
        }
        seen.insert(key, line);
        out.push(rec);
    }
    Ok(out)
}

pub fn parse_runs_csv(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_runs_csv(std::io::BufReader::new(file))
}

/// Writes records in the interchange format. Reals use the shortest
/// representation that parses back to the same value.
pub fn write_runs_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let with_budget = records.iter().any(|r| r.budget_exhausted);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = HEADER.to_vec();
    if with_budget {
        header.push(BUDGET_COLUMN);
    }
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.solver.clone(),
            r.fid.to_string(),
            r.dim.to_string(),
            r.iid.to_string(),
            r.run.to_string(),
            r.fe_count.to_string(),
            format!("{:e}", r.best_gap),
        ];
        if with_budget {
            row.push(r.budget_exhausted.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<runs csv>", e))?;
    Ok(())
}

/// Keeps the lowest run index per `(solver, fid, dim, iid)`, preserving
/// input order otherwise.
pub fn first_run_only(records: &[RunRecord]) -> Vec<RunRecord> {
    let mut first: BTreeMap<(&str, u32, u32, u32), u32> = BTreeMap::new();
    for r in records {
        let e = first.entry((r.solver.as_str(), r.fid, r.dim, r.iid)).or_insert(r.run);
        *e = (*e).min(r.run);
    }
    let mut kept = BTreeSet::new();
    records
        .iter()
        .filter(|r| {
            let k = (r.solver.as_str(), r.fid, r.dim, r.iid);
            first[&k] == r.run && kept.insert(k)
        })
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    MissingInstance,
    DuplicateRun,
    NonPositiveFeCount,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SanityIssue {
    pub solver: String,
    pub issue_kind: IssueKind,
    pub fid: u32,
    pub dim: u32,
    pub iid: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SanityReport {
    pub required_iids: Vec<u32>,
    /// Every solver seen, with its validity.
    pub solvers: BTreeMap<String, bool>,
    pub issues: Vec<SanityIssue>,
}

impl SanityReport {
    pub fn valid_solvers(&self) -> Vec<String> {
        self.solvers.iter().filter(|(_, &ok)| ok).map(|(s, _)| s.clone()).collect()
    }

    pub fn is_valid(&self, solver: &str) -> bool {
        self.solvers.get(solver).copied().unwrap_or(false)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let valid = self.solvers.values().filter(|v| **v).count();
        let _ = writeln!(s, "solvers: {} ({valid} valid)", self.solvers.len());
        let _ = writeln!(s, "required instances: {:?}", self.required_iids);
        for (solver, ok) in &self.solvers {
            let mine: Vec<&SanityIssue> = self.issues.iter().filter(|i| &i.solver == solver).collect();
            let _ = writeln!(s, "{solver}: {}", if *ok { "valid" } else { "INVALID" });
            for i in mine {
                let kind = match i.issue_kind {
                    IssueKind::MissingInstance => "missing instance",
                    IssueKind::DuplicateRun => "duplicate run",
                    IssueKind::NonPositiveFeCount => "non-positive fe_count",
                };
                let _ = writeln!(s, "  {kind}: fid {} dim {} iid {}", i.fid, i.dim, i.iid);
            }
        }
        s
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut s = String::new();
        for i in &self.issues {
            s.push_str(&serde_json::to_string(i)?);
            s.push('\n');
        }
        Ok(s)
    }
}

/// Report-only checks. The result does not depend on record order.
pub fn sanity_check(records: &[RunRecord], required_iids: &[u32]) -> SanityReport {
    let mut iids: BTreeMap<(&str, u32, u32), BTreeSet<u32>> = BTreeMap::new();
    let mut runs: BTreeMap<(&str, u32, u32, u32, u32), usize> = BTreeMap::new();
    let mut solvers: BTreeMap<String, bool> = BTreeMap::new();
    let mut issues = BTreeSet::new();
    for r in records {
        solvers.insert(r.solver.clone(), true);
        iids.entry((r.solver.as_str(), r.fid, r.dim)).or_default().insert(r.iid);
        *runs.entry((r.solver.as_str(), r.fid, r.dim, r.iid, r.run)).or_default() += 1;
        if r.fe_count == 0 {
            issues.insert(SanityIssue {
                solver: r.solver.clone(),
                issue_kind: IssueKind::NonPositiveFeCount,
                fid: r.fid,
                dim: r.dim,
                iid: r.iid,
            });
        }
    }
    for ((solver, fid, dim, iid, _), count) in runs {
        if count > 1 {
            issues.insert(SanityIssue {
                solver: solver.to_string(),
                issue_kind: IssueKind::DuplicateRun,
                fid,
                dim,
                iid,
            });
        }
    }
    for ((solver, fid, dim), have) in &iids {
        for &iid in required_iids {
            if !have.contains(&iid) {
                issues.insert(SanityIssue {
                    solver: solver.to_string(),
                    issue_kind: IssueKind::MissingInstance,
                    fid: *fid,
                    dim: *dim,
                    iid,
                });
                solvers.insert(solver.to_string(), false);
            }
        }
    }
    SanityReport { required_iids: required_iids.to_vec(), solvers, issues: issues.into_iter().collect() }
}

/// Drops records whose instance is not in `iids`.
pub fn restrict_iids(records: &[RunRecord], iids: &[u32]) -> Vec<RunRecord> {
    records.iter().filter(|r| iids.contains(&r.iid)).cloned().collect()
}
