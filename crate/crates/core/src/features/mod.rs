//! Landscape features computed from an evaluated initial design.
//!
//! Nine feature sets are implemented, all of them computed from the design
//! alone, so their cost is exactly the `n` evaluations of the design. The
//! schema is fixed for a given [`FeatureConfig`]: [`compute_all`] always
//! emits the same names in the same order, and a set that fails on a
//! particular design yields NaN values plus `<set>.failed = 1` instead of
//! aborting the whole vector.
//!
//! Set order: `basic`, `ela_distr`, `ela_level`, `ela_meta`, `disp`, `nbc`,
//! `ic`, `cm_angle`, `pca`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::key::ProblemKey;
use crate::problems::ProblemId;
use crate::sampling::{evaluate_design, improved_lhd, BoxDomain, Objective, SampleDesign};

pub mod basic;
pub mod cell_mapping;
pub mod dispersion;
pub mod distribution;
pub mod ic;
pub mod levelset;
pub mod meta;
pub mod nbc;
pub mod pca;
pub(crate) mod stats;

/// Version of the feature schema produced by [`compute_all`].
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub levelset_quantiles: Vec<f64>,
    pub dispersion_quantiles: Vec<f64>,
    pub ic: ic::IcConfig,
    pub cm_blocks_per_dim: usize,
    /// Seeds the levelset folds, the mixture initialisation and the
    /// dispersion tie-breaking.
    pub seed: u64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            levelset_quantiles: vec![0.10, 0.25, 0.50],
            dispersion_quantiles: vec![0.02, 0.05, 0.10, 0.25],
            ic: ic::IcConfig::default(),
            cm_blocks_per_dim: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureSet {
    Basic,
    Distribution,
    Levelset,
    Meta,
    Dispersion,
    NearestBetter,
    InformationContent,
    CellMappingAngle,
    Pca,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 9] = [
        FeatureSet::Basic,
        FeatureSet::Distribution,
        FeatureSet::Levelset,
        FeatureSet::Meta,
        FeatureSet::Dispersion,
        FeatureSet::NearestBetter,
        FeatureSet::InformationContent,
        FeatureSet::CellMappingAngle,
        FeatureSet::Pca,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            FeatureSet::Basic => "basic",
            FeatureSet::Distribution => "ela_distr",
            FeatureSet::Levelset => "ela_level",
            FeatureSet::Meta => "ela_meta",
            FeatureSet::Dispersion => "disp",
            FeatureSet::NearestBetter => "nbc",
            FeatureSet::InformationContent => "ic",
            FeatureSet::CellMappingAngle => "cm_angle",
            FeatureSet::Pca => "pca",
        }
    }

    /// Feature names of this set, excluding the `.failed` status flag.
    pub fn names(self, config: &FeatureConfig) -> Vec<String> {
        match self {
            FeatureSet::Basic => basic::names(),
            FeatureSet::Distribution => distribution::names(),
            FeatureSet::Levelset => levelset::names(&config.levelset_quantiles),
            FeatureSet::Meta => meta::names(),
            FeatureSet::Dispersion => dispersion::names(&config.dispersion_quantiles),
            FeatureSet::NearestBetter => nbc::names(),
            FeatureSet::InformationContent => ic::names(),
            FeatureSet::CellMappingAngle => cell_mapping::names(),
            FeatureSet::Pca => pca::names(),
        }
    }

    pub fn compute(self, design: &SampleDesign, config: &FeatureConfig) -> Result<FeatureVector> {
        match self {
            FeatureSet::Basic => basic::basic(design),
            FeatureSet::Distribution => distribution::ela_distribution(design),
            FeatureSet::Levelset => {
                levelset::ela_levelset(design, &config.levelset_quantiles, config.seed)
            }
            FeatureSet::Meta => meta::ela_meta(design),
            FeatureSet::Dispersion => {
                dispersion::disp(design, &config.dispersion_quantiles, config.seed)
            }
            FeatureSet::NearestBetter => nbc::nbc(design),
            FeatureSet::InformationContent => ic::ic(design, &config.ic),
            FeatureSet::CellMappingAngle => cell_mapping::cm_angle(design, config.cm_blocks_per_dim),
            FeatureSet::Pca => pca::pca(design),
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

/// Named feature values of one problem plus the evaluations they cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub cost_evals: usize,
}

impl FeatureVector {
    pub fn new(names: Vec<String>, values: Vec<f64>, cost_evals: usize) -> Self {
        debug_assert_eq!(names.len(), values.len());
        FeatureVector {
            names,
            values,
            cost_evals,
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Same values, compared bitwise (NaN equals NaN).
    pub fn bitwise_eq(&self, other: &FeatureVector) -> bool {
        self.names == other.names
            && self.cost_evals == other.cost_evals
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

pub(crate) fn prefixed(prefix: &str, names: &[&str]) -> Vec<String> {
    names.iter().map(|n| format!("{prefix}.{n}")).collect()
}

/// Full schema of [`compute_all`].
pub fn schema(config: &FeatureConfig) -> Vec<String> {
    let mut names = Vec::new();
    for set in FeatureSet::ALL {
        names.extend(set.names(config));
        names.push(format!("{}.failed", set.prefix()));
    }
    names
}

/// All nine sets concatenated in the fixed order, each followed by its
/// `.failed` flag.
pub fn compute_all(design: &SampleDesign, config: &FeatureConfig) -> Result<FeatureVector> {
    design.values()?;
    let mut names = Vec::new();
    let mut values = Vec::new();
    for set in FeatureSet::ALL {
        let expected = set.names(config);
        match set.compute(design, config) {
            Ok(fv) => {
                debug_assert_eq!(fv.names, expected, "{set} emitted an unexpected schema");
                values.extend(fv.values);
                values.push(0.0);
            }
            Err(e) => {
                log::debug!("feature set {set} failed: {e}");
                values.extend(std::iter::repeat_n(f64::NAN, expected.len()));
                values.push(1.0);
            }
        }
        names.extend(expected);
        names.push(format!("{}.failed", set.prefix()));
    }
    Ok(FeatureVector::new(names, values, design.n()))
}

/// Draws an improved LHD of `design_mult * d` points, evaluates it once per
/// point and computes every set on it.
pub fn characterise<O: Objective + ?Sized>(
    f: &O,
    domain: &BoxDomain,
    design_mult: usize,
    seed: u64,
    config: &FeatureConfig,
) -> Result<FeatureVector> {
    let design = improved_lhd(design_mult * domain.dim(), domain, seed)?;
    let evaluated = evaluate_design(&design, f)?;
    compute_all(&evaluated, config)
}

/// Row key of a feature matrix: a problem, or a single instance of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RowKey {
    pub problem: ProblemKey,
    pub iid: Option<u32>,
}

impl From<ProblemId> for RowKey {
    fn from(id: ProblemId) -> Self {
        RowKey {
            problem: id.problem(),
            iid: Some(id.iid()),
        }
    }
}

impl From<ProblemKey> for RowKey {
    fn from(problem: ProblemKey) -> Self {
        RowKey { problem, iid: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub key: RowKey,
    pub values: Vec<f64>,
    pub cost_evals: usize,
}

/// Feature vectors of many problems sharing one schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

impl FeatureMatrix {
    pub fn from_vectors<K: Into<RowKey>>(
        vectors: impl IntoIterator<Item = (K, FeatureVector)>,
    ) -> Result<Self> {
        let mut names: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (key, fv) in vectors {
            let key = key.into();
            match &names {
                None => names = Some(fv.names.clone()),
                Some(n) if *n != fv.names => {
                    return Err(Error::SchemaMismatch(format!(
                        "row {:?} has a different feature list",
                        key
                    )))
                }
                Some(_) => {}
            }
            rows.push(FeatureRow {
                key,
                values: fv.values,
                cost_evals: fv.cost_evals,
            });
        }
        Ok(FeatureMatrix {
            names: names.unwrap_or_default(),
            rows,
        })
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, key: RowKey) -> Option<&FeatureRow> {
        self.rows.iter().find(|r| r.key == key)
    }

    /// Row of an aggregated problem.
    pub fn problem_row(&self, problem: ProblemKey) -> Option<&FeatureRow> {
        self.row(problem.into())
    }

    pub fn problems(&self) -> Vec<ProblemKey> {
        self.rows.iter().map(|r| r.key.problem).collect()
    }

    pub fn is_per_instance(&self) -> bool {
        self.rows.iter().any(|r| r.key.iid.is_some())
    }

    fn check(&self) -> Result<()> {
        for r in &self.rows {
            if r.values.len() != self.names.len() {
                return Err(Error::SchemaMismatch(format!(
                    "row {:?} has {} values for {} names",
                    r.key,
                    r.values.len(),
                    self.names.len()
                )));
            }
        }
        Ok(())
    }

    /// `fid,dim[,iid],<names...>`; NaN rendered as an empty cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let per_instance = self.is_per_instance();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["fid".to_string(), "dim".to_string()];
        if per_instance {
            header.push("iid".into());
        }
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.key.problem.fid.to_string(), r.key.problem.dim.to_string()];
            if per_instance {
                rec.push(r.key.iid.map(|i| i.to_string()).unwrap_or_default());
            }
            rec.extend(r.values.iter().map(|v| fmt_cell(*v)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<feature csv>", e))?;
        Ok(())
    }

    /// Parse the CSV written by [`FeatureMatrix::write_csv`]. Row costs are
    /// not part of the format and default to `design_mult * dim`.
    pub fn read_csv<R: Read>(input: R, design_mult: usize) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.get(0) != Some("fid") || header.get(1) != Some("dim") {
            return Err(Error::Parse {
                line: 1,
                message: "feature CSV must start with `fid,dim`".into(),
            });
        }
        let per_instance = header.get(2) == Some("iid");
        let first = if per_instance { 3 } else { 2 };
        let names: Vec<String> = header.iter().skip(first).map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let int = |i: usize| -> Result<u32> {
                rec.get(i).unwrap_or("").trim().parse().map_err(|e| Error::Parse {
                    line,
                    message: format!("column {}: {e}", header.get(i).unwrap_or("?")),
                })
            };
            let problem = ProblemKey::new(int(0)?, int(1)?);
            let iid = if per_instance { Some(int(2)?) } else { None };
            let values = rec
                .iter()
                .skip(first)
                .map(|cell| parse_cell(cell, line))
                .collect::<Result<Vec<_>>>()?;
            rows.push(FeatureRow {
                key: RowKey { problem, iid },
                values,
                cost_evals: design_mult * problem.dim as usize,
            });
        }
        let m = FeatureMatrix { names, rows };
        m.check()?;
        Ok(m)
    }
}

pub(crate) fn fmt_cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

pub(crate) fn parse_cell(cell: &str, line: u64) -> Result<f64> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(f64::NAN);
    }
    cell.parse().map_err(|e| Error::Parse {
        line,
        message: format!("`{cell}`: {e}"),
    })
}

/// Median of every feature over the instances of each `(fid, dim)`,
/// ignoring NaN. Output rows are ordered by problem.
pub fn aggregate_median(matrix: &FeatureMatrix) -> Result<FeatureMatrix> {
    matrix.check()?;
    let mut groups: BTreeMap<ProblemKey, Vec<&FeatureRow>> = BTreeMap::new();
    for r in &matrix.rows {
        groups.entry(r.key.problem).or_default().push(r);
    }
    let p = matrix.names.len();
    let rows = groups
        .into_iter()
        .map(|(problem, members)| {
            let values = (0..p)
                .map(|j| stats::median(&members.iter().map(|r| r.values[j]).collect::<Vec<_>>()))
                .collect();
            let cost = members.iter().map(|r| r.cost_evals).max().unwrap_or(0);
            FeatureRow {
                key: problem.into(),
                values,
                cost_evals: cost,
            }
        })
        .collect();
    Ok(FeatureMatrix {
        names: matrix.names.clone(),
        rows,
    })
}
