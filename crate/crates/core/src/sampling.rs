//! Space-filling initial designs in box-constrained decision spaces.
//!
//! The improved Latin hypercube design starts from a seeded random Latin
//! hypercube and runs a fixed budget of maximin swap moves: pick a column and
//! two rows, exchange their coordinates in that column, and keep the exchange
//! only if the smallest pairwise Euclidean distance of the design grows.
//! Exchanging entries within a column keeps every axis a permutation of the
//! bins, so the Latin property survives every move.

use std::io::{Read, Write};
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Default number of swap moves of the improved design.
pub const DEFAULT_SWAP_BUDGET: usize = 1000;

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidArgument("domain must have dimension >= 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidArgument(format!(
                "domain bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidArgument(format!(
                    "degenerate domain on axis {k}: [{lo}, {hi}]"
                )));
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    /// `[-5, 5]^dim`, the search space of the benchmark suite.
    pub fn bbob(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        BoxDomain {
            lower: vec![-5.0; dim],
            upper: vec![5.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, k: usize) -> f64 {
        self.upper[k] - self.lower[k]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Same box moved by `offset`.
    pub fn translated(&self, offset: &[f64]) -> Self {
        BoxDomain {
            lower: self.lower.iter().zip(offset).map(|(a, b)| a + b).collect(),
            upper: self.upper.iter().zip(offset).map(|(a, b)| a + b).collect(),
        }
    }

    /// Same box scaled about the origin by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        BoxDomain {
            lower: self.lower.iter().map(|a| a * factor).collect(),
            upper: self.upper.iter().map(|a| a * factor).collect(),
        }
    }
}

/// An initial design: `n` points in a domain, optionally with their objective values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDesign {
    pub points: Vec<Vec<f64>>,
    pub values: Option<Vec<f64>>,
    pub domain: BoxDomain,
    pub evals_consumed: usize,
}

impl SampleDesign {
    /// Design from explicit points and values, e.g. for hand-built fixtures.
    pub fn from_parts(points: Vec<Vec<f64>>, values: Vec<f64>, domain: BoxDomain) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !domain.contains(p)) {
            return Err(Error::InvalidArgument(format!(
                "point {i} lies outside the domain"
            )));
        }
        let n = points.len();
        Ok(SampleDesign {
            points,
            values: Some(values),
            domain,
            evals_consumed: n,
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Objective values, or an error if the design has not been evaluated.
    pub fn values(&self) -> Result<&[f64]> {
        self.values
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("design has no objective values".into()))
    }
}

/// A black-box objective on `R^d`.
pub trait Objective: Sync {
    fn evaluate(&self, x: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn evaluate(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Wraps an objective and counts calls.
pub struct CountingObjective<O> {
    inner: O,
    calls: AtomicUsize,
}

impl<O: Objective> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        CountingObjective {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<O: Objective> Objective for CountingObjective<O> {
    fn evaluate(&self, x: &[f64]) -> f64 {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.evaluate(x)
    }
}

/// Coordinate inside bin `cell` of `n` equal bins; falls back to the bin
/// midpoint if rounding pushed the jittered value across the bin edge.
fn latin_coordinate(lo: f64, width: f64, n: usize, cell: usize, jitter: f64) -> f64 {
    let x = lo + width * (cell as f64 + jitter) / n as f64;
    if bin_of(x, lo, width, n) == cell {
        x
    } else {
        lo + width * (cell as f64 + 0.5) / n as f64
    }
}

/// Bin index of `x` among `n` equal-width bins of `[lo, lo + width]`; the
/// upper edge belongs to the last bin.
pub fn bin_of(x: f64, lo: f64, width: f64, n: usize) -> usize {
    let b = ((x - lo) / width * n as f64).floor();
    if b < 0.0 {
        0
    } else {
        (b as usize).min(n - 1)
    }
}

fn check_design_args(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "design needs at least 2 points, got {n}"
        )));
    }
    Ok(())
}

fn plain_lhs_with(n: usize, domain: &BoxDomain, rng: &mut rng::Rng) -> Vec<Vec<f64>> {
    let d = domain.dim();
    let mut points = vec![vec![0.0; d]; n];
    let mut cells: Vec<usize> = (0..n).collect();
    for k in 0..d {
        cells.shuffle(rng);
        for (i, &cell) in cells.iter().enumerate() {
            let jitter: f64 = rng.random();
            points[i][k] = latin_coordinate(domain.lower[k], domain.width(k), n, cell, jitter);
        }
    }
    points
}

/// Random Latin hypercube without the maximin improvement.
///
/// [`improved_lhd`] with the same seed starts from exactly this design.
pub fn plain_lhs(n: usize, domain: &BoxDomain, seed: u64) -> Result<SampleDesign> {
    check_design_args(n)?;
    let mut rng = rng::rng(seed);
    let points = plain_lhs_with(n, domain, &mut rng);
    Ok(SampleDesign {
        points,
        values: None,
        domain: domain.clone(),
        evals_consumed: n,
    })
}

/// Improved Latin hypercube design with the default swap budget.
pub fn improved_lhd(n: usize, domain: &BoxDomain, seed: u64) -> Result<SampleDesign> {
    improved_lhd_with_budget(n, domain, seed, DEFAULT_SWAP_BUDGET)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Smallest pairwise Euclidean distance of a point set.
pub fn min_pairwise_distance(points: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(sq_dist(&points[i], &points[j]));
        }
    }
    best.sqrt()
}

struct PairwiseDistances {
    n: usize,
    sq: Vec<f64>,
}

impl PairwiseDistances {
    fn new(points: &[Vec<f64>]) -> Self {
        let n = points.len();
        let mut sq = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = sq_dist(&points[i], &points[j]);
                sq[i * n + j] = d;
                sq[j * n + i] = d;
            }
        }
        PairwiseDistances { n, sq }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.sq[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, d: f64) {
        self.sq[i * self.n + j] = d;
        self.sq[j * self.n + i] = d;
    }

    /// Closest pair, ties to the lexicographically first.
    fn argmin(&self) -> (usize, usize, f64) {
        let mut best = (0, 1, f64::INFINITY);
        for i in 0..self.n {
            for j in i + 1..self.n {
                let d = self.get(i, j);
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        best
    }

    /// Closest pair among pairs touching neither `a` nor `b`.
    fn argmin_excluding(&self, a: usize, b: usize) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::INFINITY);
        for i in 0..self.n {
            if i == a || i == b {
                continue;
            }
            for j in i + 1..self.n {
                if j == a || j == b {
                    continue;
                }
                let d = self.get(i, j);
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        best
    }
}

/// Improved Latin hypercube design with an explicit swap budget.
///
/// Each move takes one point of the current closest pair and a uniformly
/// drawn partner, exchanges their coordinate on a uniformly drawn axis, and
/// is accepted iff the design's minimum pairwise distance strictly increases.
pub fn improved_lhd_with_budget(
    n: usize,
    domain: &BoxDomain,
    seed: u64,
    swaps: usize,
) -> Result<SampleDesign> {
    check_design_args(n)?;
    let d = domain.dim();
    let mut rng = rng::rng(seed);
    let mut points = plain_lhs_with(n, domain, &mut rng);
    let mut dist = PairwiseDistances::new(&points);
    let mut closest = dist.argmin();
    let mut fresh_i = vec![0.0; n];
    let mut fresh_j = vec![0.0; n];

    for _ in 0..swaps {
        let i = if rng.random_bool(0.5) { closest.0 } else { closest.1 };
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k = rng.random_range(0..d);

        let (vi, vj) = (points[i][k], points[j][k]);
        points[i][k] = vj;
        points[j][k] = vi;

        let mut changed_min = (0, 0, f64::INFINITY);
        for r in 0..n {
            if r != i {
                fresh_i[r] = sq_dist(&points[i], &points[r]);
            }
            if r != j {
                fresh_j[r] = sq_dist(&points[j], &points[r]);
            }
        }
        for r in 0..n {
            if r != i && fresh_i[r] < changed_min.2 {
                changed_min = (i.min(r), i.max(r), fresh_i[r]);
            }
            if r != j && r != i && fresh_j[r] < changed_min.2 {
                changed_min = (j.min(r), j.max(r), fresh_j[r]);
            }
        }

        let accept = changed_min.2 > closest.2 && {
            let rest = dist.argmin_excluding(i, j);
            rest.2 > closest.2
        };
        if accept {
            for r in 0..n {
                if r != i {
                    dist.set(i, r, fresh_i[r]);
                }
                if r != j {
                    dist.set(j, r, fresh_j[r]);
                }
            }
            closest = dist.argmin();
        } else {
            points[i][k] = vi;
            points[j][k] = vj;
        }
    }

    Ok(SampleDesign {
        points,
        values: None,
        domain: domain.clone(),
        evals_consumed: n,
    })
}

/// Attach objective values; one call per point.
pub fn evaluate_design<O: Objective + ?Sized>(design: &SampleDesign, f: &O) -> Result<SampleDesign> {
    if design.values.is_some() {
        return Err(Error::InvalidArgument("design is already evaluated".into()));
    }
    let mut values = Vec::with_capacity(design.n());
    for (index, x) in design.points.iter().enumerate() {
        let value = f.evaluate(x);
        if !value.is_finite() {
            return Err(Error::Evaluation { index, value });
        }
        values.push(value);
    }
    Ok(SampleDesign {
        points: design.points.clone(),
        values: Some(values),
        domain: design.domain.clone(),
        evals_consumed: design.evals_consumed,
    })
}

/// Write `x1,...,xd[,y]`.
pub fn write_design_csv<W: Write>(design: &SampleDesign, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let d = design.dim();
    let mut header: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    if design.values.is_some() {
        header.push("y".into());
    }
    w.write_record(&header)?;
    for (i, p) in design.points.iter().enumerate() {
        let mut row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        if let Some(values) = &design.values {
            row.push(values[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<design csv>", e))?;
    Ok(())
}

/// Read a design CSV. Without an explicit domain, `[-5, 5]^d` is assumed.
pub fn read_design_csv<R: Read>(input: R, domain: Option<BoxDomain>) -> Result<SampleDesign> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let has_y = header.iter().next_back() == Some("y");
    let d = header.len() - usize::from(has_y);
    for (k, name) in header.iter().take(d).enumerate() {
        if name != format!("x{}", k + 1) {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected column x{}, found `{name}`", k + 1),
            });
        }
    }
    if d == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "design has no coordinate columns".into(),
        });
    }
    let domain = domain.unwrap_or_else(|| BoxDomain::bbob(d));
    if domain.dim() != d {
        return Err(Error::InvalidArgument(format!(
            "design has {d} columns but domain has dimension {}",
            domain.dim()
        )));
    }
    let mut points = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("`{s}`: {e}"),
            })
        };
        let point = rec.iter().take(d).map(parse).collect::<Result<Vec<_>>>()?;
        if !domain.contains(&point) {
            return Err(Error::Parse {
                line,
                message: "point lies outside the domain".into(),
            });
        }
        points.push(point);
        if has_y {
            values.push(parse(rec.get(d).unwrap_or(""))?);
        }
    }
    let n = points.len();
    Ok(SampleDesign {
        points,
        values: has_y.then_some(values),
        domain,
        evals_consumed: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn latin_ok(design: &SampleDesign) -> bool {
        let n = design.n();
        (0..design.dim()).all(|k| {
            let mut seen = vec![0usize; n];
            for p in &design.points {
                seen[bin_of(p[k], design.domain.lower()[k], design.domain.width(k), n)] += 1;
            }
            seen.iter().all(|&c| c == 1)
        })
    }

    #[test]
    fn one_dimensional_latin_bins() {
        let dom = BoxDomain::new(vec![0.0], vec![1.0]).unwrap();
        let design = improved_lhd(4, &dom, 3).unwrap();
        let mut bins: Vec<usize> = design.points.iter().map(|p| bin_of(p[0], 0.0, 1.0, 4)).collect();
        bins.sort();
        assert_eq!(bins, vec![0, 1, 2, 3]);
        for p in &design.points {
            assert!((0.0..=1.0).contains(&p[0]));
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let dom = BoxDomain::bbob(2);
        let a = improved_lhd(100, &dom, 11).unwrap();
        let b = improved_lhd(100, &dom, 11).unwrap();
        assert_eq!(a, b);
        let c = improved_lhd(100, &dom, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn improvement_never_loses_to_plain_lhs() {
        let dom = BoxDomain::bbob(5);
        for seed in 0..3 {
            let plain = plain_lhs(250, &dom, seed).unwrap();
            let improved = improved_lhd(250, &dom, seed).unwrap();
            assert_eq!(improved.n(), 250);
            assert!(latin_ok(&improved));
            let (a, b) = (
                min_pairwise_distance(&plain.points),
                min_pairwise_distance(&improved.points),
            );
            assert!(b >= a, "seed {seed}: {b} < {a}");
        }
    }

    #[test]
    fn improvement_is_strict_on_small_designs() {
        let dom = BoxDomain::bbob(2);
        let plain = plain_lhs(20, &dom, 5).unwrap();
        let improved = improved_lhd(20, &dom, 5).unwrap();
        assert!(min_pairwise_distance(&improved.points) > min_pairwise_distance(&plain.points));
    }

    #[test]
    fn latin_property_on_many_shapes() {
        for (n, d, seed) in [(2, 1, 0), (7, 3, 1), (50, 10, 2), (150, 3, 3)] {
            let dom = BoxDomain::new(vec![-1.0; d], vec![3.0; d]).unwrap();
            let design = improved_lhd(n, &dom, seed).unwrap();
            assert!(latin_ok(&design), "n={n} d={d}");
            assert!(design.points.iter().all(|p| dom.contains(p)));
            assert_eq!(design.evals_consumed, n);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            improved_lhd(1, &BoxDomain::bbob(2), 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(BoxDomain::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(BoxDomain::new(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(BoxDomain::new(vec![], vec![]).is_err());
    }

    #[test]
    fn evaluation_attaches_values() {
        let dom = BoxDomain::bbob(3);
        let design = improved_lhd(10, &dom, 0).unwrap();
        let c = evaluate_design(&design, &|_: &[f64]| 4.5).unwrap();
        assert_eq!(c.values().unwrap(), &[4.5; 10]);
        assert_eq!(c.evals_consumed, 10);

        let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        assert_eq!(sphere.evaluate(&[0.0, 0.0]), 0.0);
        assert!(evaluate_design(&c, &sphere).is_err());
    }

    #[test]
    fn non_finite_value_reports_index() {
        let dom = BoxDomain::new(vec![0.0], vec![1.0]).unwrap();
        let design = plain_lhs(5, &dom, 0).unwrap();
        let bad = |x: &[f64]| if x[0] > 0.6 { f64::NAN } else { x[0] };
        let expected = design.points.iter().position(|p| p[0] > 0.6).unwrap();
        match evaluate_design(&design, &bad) {
            Err(Error::Evaluation { index, .. }) => assert_eq!(index, expected),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn counting_wrapper_counts() {
        let dom = BoxDomain::bbob(2);
        let design = improved_lhd(12, &dom, 0).unwrap();
        let f = CountingObjective::new(|x: &[f64]| x[0]);
        evaluate_design(&design, &f).unwrap();
        assert_eq!(f.calls(), 12);
    }

    #[test]
    fn csv_round_trip_with_and_without_values() {
        let dom = BoxDomain::bbob(2);
        let design = improved_lhd(6, &dom, 9).unwrap();
        let mut buf = Vec::new();
        write_design_csv(&design, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2\n"));
        assert_eq!(read_design_csv(&buf[..], None).unwrap(), design);

        let evaluated = evaluate_design(&design, &|x: &[f64]| x[0] - x[1]).unwrap();
        let mut buf = Vec::new();
        write_design_csv(&evaluated, &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("x1,x2,y\n"));
        assert_eq!(read_design_csv(&buf[..], None).unwrap(), evaluated);
    }

    #[test]
    fn csv_rejects_out_of_domain_rows() {
        let text = "x1,y\n7.5,1\n";
        assert!(matches!(
            read_design_csv(text.as_bytes(), None),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
