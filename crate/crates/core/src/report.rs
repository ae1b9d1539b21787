//! Summary tables and plot data: mean relERT per dimension and function
//! group, ERT scatter data, predicted-vs-best confusion counts and the
//! portfolio-best to overall-best ERT ratios.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::key::{bbob_group, ProblemKey, BBOB_GROUPS};
use crate::performance::PerformanceTable;
use crate::selection::{CostModel, CvResult};

/// A selector column: its per-problem choices from cross-validation.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectorColumn {
    pub name: String,
    pub cv: CvResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    /// `None` for the row over all dimensions.
    pub dim: Option<u32>,
    /// `None` for the row over all functions.
    pub group: Option<String>,
    pub n_problems: usize,
    pub values: Vec<f64>,
    /// Solver with the lowest mean relERT in this cell.
    pub best_solver: String,
}

impl SummaryRow {
    pub fn dim_label(&self) -> String {
        self.dim.map_or("all".into(), |d| d.to_string())
    }

    pub fn group_label(&self) -> String {
        self.group.clone().unwrap_or_else(|| "all".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub columns: Vec<String>,
    pub n_solvers: usize,
    pub rows: Vec<SummaryRow>,
}

fn fmt_cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.1}")
    }
}

impl SummaryTable {
    /// Rows for each dimension (groups, then all) followed by the same over
    /// all dimensions. Solver cells are cost-free mean relERT, selector cells
    /// the cost-inclusive cross-validated mean relERT.
    pub fn build(table: &PerformanceTable, selectors: &[SelectorColumn]) -> Result<Self> {
        for s in selectors {
            if s.cv.problems != table.problems {
                return Err(Error::Alignment {
                    without_performance: s.cv.problems.iter().filter(|p| !table.problems.contains(p)).copied().collect(),
                    without_features: table.problems.iter().filter(|p| !s.cv.problems.contains(p)).copied().collect(),
                });
            }
        }
        let mut columns = table.solvers.clone();
        columns.extend(selectors.iter().map(|s| s.name.clone()));
        let dims: BTreeSet<u32> = table.problems.iter().map(|p| p.dim).collect();
        let mut rows = Vec::new();
        let dim_axis: Vec<Option<u32>> = dims.iter().map(|&d| Some(d)).chain([None]).collect();
        for dim in dim_axis {
            let group_axis: Vec<Option<&str>> = BBOB_GROUPS.iter().map(|g| Some(*g)).chain([None]).collect();
            for group in group_axis {
                let cols: Vec<usize> = (0..table.n_problems())
                    .filter(|&j| {
                        let p = table.problems[j];
                        dim.is_none_or(|d| p.dim == d) && group.is_none_or(|g| bbob_group(p.fid) == Some(g))
                    })
                    .collect();
                if cols.is_empty() {
                    continue;
                }
                let mut values: Vec<f64> =
                    (0..table.n_solvers()).map(|s| table.mean_relert_over(s, &cols)).collect();
                let best = crate::selection::learner::argmin(&values);
                for s in selectors {
                    values.push(cols.iter().map(|&j| s.cv.relert_cost[j]).sum::<f64>() / cols.len() as f64);
                }
                rows.push(SummaryRow {
                    dim,
                    group: group.map(str::to_string),
                    n_problems: cols.len(),
                    values,
                    best_solver: table.solvers[best].clone(),
                });
            }
        }
        Ok(SummaryTable { columns, n_solvers: table.n_solvers(), rows })
    }

    pub fn cell(&self, dim: Option<u32>, group: Option<&str>, column: &str) -> Option<f64> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows
            .iter()
            .find(|r| r.dim == dim && r.group.as_deref() == group)
            .map(|r| r.values[c])
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["dim".to_string(), "group".into(), "n_problems".into()];
        header.extend(self.columns.iter().cloned());
        header.push("best_solver".into());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.dim_label(), r.group_label(), r.n_problems.to_string()];
            rec.extend(r.values.iter().map(|v| format!("{v}")));
            rec.push(r.best_solver.clone());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<summary csv>", e))?;
        Ok(())
    }

    /// Markdown with one decimal; the best solver of each row is bold.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "| dim | group | {} |", self.columns.join(" | "));
        let _ = writeln!(s, "|---|---|{}", "---:|".repeat(self.columns.len()));
        for r in &self.rows {
            let cells: Vec<String> = r
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if i < self.n_solvers && self.columns[i] == r.best_solver {
                        format!("**{}**", fmt_cell(v))
                    } else {
                        fmt_cell(v)
                    }
                })
                .collect();
            let _ = writeln!(s, "| {} | {} | {} |", r.dim_label(), r.group_label(), cells.join(" | "));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub problem: ProblemKey,
    pub vbs_ert: f64,
    /// ERT of the chosen solver plus the feature cost; `inf` if it never
    /// succeeded.
    pub selector_ert: f64,
}

pub fn scatter(table: &PerformanceTable, cv: &CvResult, cost: CostModel) -> Result<Vec<ScatterPoint>> {
    let mut out = Vec::with_capacity(cv.problems.len());
    for (p, solver) in cv.problems.iter().zip(&cv.predicted) {
        let j = table.problem_index(*p).ok_or_else(|| Error::InvalidArgument(format!("unknown problem {p}")))?;
        let s = table.solver_index(solver).ok_or_else(|| Error::InvalidArgument(format!("unknown solver {solver}")))?;
        let e = table.ert[s][j];
        out.push(ScatterPoint {
            problem: *p,
            vbs_ert: table.best_ert(j),
            selector_ert: if e.is_finite() { e + cost.evals(*p) } else { f64::INFINITY },
        });
    }
    Ok(out)
}

pub fn write_scatter_csv<W: Write>(points: &[ScatterPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["fid", "dim", "vbs_ert", "selector_ert", "log10_vbs_ert", "log10_selector_ert"])?;
    for p in points {
        w.write_record([
            p.problem.fid.to_string(),
            p.problem.dim.to_string(),
            format!("{}", p.vbs_ert),
            format!("{}", p.selector_ert),
            format!("{}", p.vbs_ert.log10()),
            format!("{}", p.selector_ert.log10()),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<scatter csv>", e))?;
    Ok(())
}

/// Counts of (best solver, predicted solver) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    pub solvers: Vec<String>,
    /// `counts[best][predicted]`.
    pub counts: Vec<Vec<usize>>,
}

impl Confusion {
    pub fn build(solvers: &[String], labels: &BTreeMap<ProblemKey, String>, cv: &CvResult) -> Result<Self> {
        let idx = |s: &str| {
            solvers
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown solver {s}")))
        };
        let mut counts = vec![vec![0; solvers.len()]; solvers.len()];
        for (p, pred) in cv.problems.iter().zip(&cv.predicted) {
            let best = labels.get(p).ok_or_else(|| Error::InvalidArgument(format!("no label for {p}")))?;
            counts[idx(best)?][idx(pred)?] += 1;
        }
        Ok(Confusion { solvers: solvers.to_vec(), counts })
    }

    pub fn label_counts(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["best".to_string(), "#".into()];
        header.extend(self.solvers.iter().cloned());
        w.write_record(&header)?;
        for (i, row) in self.counts.iter().enumerate() {
            let mut rec = vec![self.solvers[i].clone(), row.iter().sum::<usize>().to_string()];
            rec.extend(row.iter().map(ToString::to_string));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<confusion csv>", e))?;
        Ok(())
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "| best | # | {} |", self.solvers.join(" | "));
        let _ = writeln!(s, "|---|---:|{}", "---:|".repeat(self.solvers.len()));
        for (i, row) in self.counts.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "| {} | {} | {} |", self.solvers[i], row.iter().sum::<usize>(), cells.join(" | "));
        }
        s
    }
}

/// Best portfolio ERT over best overall ERT, per problem present in both.
pub fn vbs_ratios(full: &PerformanceTable, portfolio: &PerformanceTable) -> Vec<(ProblemKey, f64)> {
    portfolio
        .problems
        .iter()
        .enumerate()
        .filter_map(|(j, p)| full.problem_index(*p).map(|k| (*p, portfolio.best_ert(j) / full.best_ert(k))))
        .collect()
}

pub fn write_ratio_csv<W: Write>(ratios: &[(ProblemKey, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["fid", "dim", "ratio"])?;
    for (p, r) in ratios {
        w.write_record([p.fid.to_string(), p.dim.to_string(), format!("{r}")])?;
    }
    w.flush().map_err(|e| Error::io("<ratio csv>", e))?;
    Ok(())
}

/// Five-number summary (type-7 quartiles).
pub fn five_numbers(values: &[f64]) -> [f64; 5] {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return [f64::NAN; 5];
    }
    v.sort_by(f64::total_cmp);
    let q = |p| crate::features::stats::quantile_sorted(&v, p);
    [v[0], q(0.25), q(0.5), q(0.75), v[v.len() - 1]]
}

const W: f64 = 420.0;
const H: f64 = 420.0;
const M: f64 = 50.0;

fn svg_open(s: &mut String, title: &str) {
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{title}</text>"#, W / 2.0);
}

/// Log-log scatter of VBS ERT against selector ERT with the diagonal.
pub fn scatter_svg(points: &[ScatterPoint], title: &str) -> String {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.selector_ert.is_finite())
        .map(|p| (p.vbs_ert.log10(), p.selector_ert.log10()))
        .collect();
    let lo = logs.iter().flat_map(|&(a, b)| [a, b]).fold(f64::INFINITY, f64::min).floor();
    let hi = logs.iter().flat_map(|&(a, b)| [a, b]).fold(f64::NEG_INFINITY, f64::max).ceil();
    let (lo, hi) = if lo.is_finite() && hi > lo { (lo, hi) } else { (0.0, 1.0) };
    let px = |v: f64| M + (v - lo) / (hi - lo) * (W - 2.0 * M);
    let py = |v: f64| H - M - (v - lo) / (hi - lo) * (H - 2.0 * M);
    let mut s = String::new();
    svg_open(&mut s, title);
    let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="grey" stroke-dasharray="4"/>"#, px(lo), py(lo), px(hi), py(hi));
    let _ = writeln!(s, r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - 2.0 * M, H - 2.0 * M);
    for e in lo as i32..=hi as i32 {
        let v = e as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">1e{e}</text>"#, px(v), H - M + 15.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">1e{e}</text>"#, M - 4.0, py(v) + 4.0);
    }
    for (a, b) in logs {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, px(a), py(b));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">VBS ERT</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(s, r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">selector ERT</text>"#, H / 2.0, H / 2.0);
    s.push_str("</svg>\n");
    s
}

/// Box plots of `(label, values)` groups on a log scale.
pub fn boxplot_svg(groups: &[(String, Vec<f64>)], title: &str) -> String {
    let stats: Vec<(String, [f64; 5])> = groups
        .iter()
        .map(|(l, v)| (l.clone(), five_numbers(&v.iter().map(|x| x.log10()).collect::<Vec<_>>())))
        .collect();
    let hi = stats.iter().map(|(_, s)| s[4]).filter(|v| v.is_finite()).fold(0.0, f64::max).max(0.1);
    let py = |v: f64| H - M - v / hi * (H - 2.0 * M);
    let slot = (W - 2.0 * M) / stats.len().max(1) as f64;
    let mut s = String::new();
    svg_open(&mut s, title);
    let _ = writeln!(s, r#"<line x1="{M}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, H - M, W - M, H - M);
    let _ = writeln!(s, r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">log10 ratio</text>"#, H / 2.0, H / 2.0);
    for (i, (label, q)) in stats.iter().enumerate() {
        let cx = M + slot * (i as f64 + 0.5);
        let _ = writeln!(s, r#"<text x="{cx}" y="{}" text-anchor="middle">{label}</text>"#, H - M + 15.0);
        if q.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let w = slot * 0.3;
        let _ = writeln!(s, r#"<line x1="{cx}" y1="{:.2}" x2="{cx}" y2="{:.2}" stroke="black"/>"#, py(q[0]), py(q[4]));
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="lightsteelblue" stroke="black"/>"#,
            cx - w,
            py(q[3]),
            2.0 * w,
            (py(q[1]) - py(q[3])).max(0.5)
        );
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#, cx - w, py(q[2]), cx + w, py(q[2]));
    }
    s.push_str("</svg>\n");
    s
}
