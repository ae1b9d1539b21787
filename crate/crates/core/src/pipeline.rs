//! The end-to-end pipeline behind the command-line front-end: configuration,
//! artifact layout and the `features`, `performance`, `train`, `report` and
//! `run-all` commands.
//!
//! Artifact layout under the output directory:
//!
//! ```text
//! runs.csv                      synthetic run log (when no runs file is given)
//! manifest.csv                  instances of the suite
//! features/instances.csv        one row per instance
//! features/problems.csv         median over instances
//! features/meta.json
//! performance/ert_all.csv       every valid solver, with meta_all.json
//! performance/ert.csv           portfolio solvers, with relert.csv and meta.json
//! performance/portfolio.json
//! performance/sanity.txt, sanity.jsonl
//! train/leaderboard.csv
//! train/best_model.json
//! train/cv_best.csv, cv_oracle.csv
//! report/summary.csv, summary.md, scatter.csv, scatter_d<dim>.svg,
//!        confusion.csv, confusion.md, vbs_ratio.csv, vbs_ratio.svg
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{aggregate_median, characterise, schema, FeatureConfig, FeatureMatrix, SCHEMA_VERSION};
use crate::ingest::{first_run_only, parse_runs_csv, restrict_iids, sanity_check, write_runs_csv};
use crate::performance::{build_portfolio, relert_table, sbs, PerformanceTable};
use crate::problems::{suite, write_manifest_csv, ProblemId, SeedScheme, DEFAULT_DIMS, DEFAULT_IIDS, FUNCTION_IDS};
use crate::report::{self, Confusion, SelectorColumn, SummaryTable};
use crate::rng;
use crate::sampling::CountingObjective;
use crate::selection::learner::ForestParams;
use crate::selection::{
    grid_search, label_best, oracle_cv, schema_hash, train, CostModel, CvResult, Dataset, FsStrategy, GaParams,
    LearnerConfig, Paradigm,
};
use crate::synthetic;

pub const WORKERS_ENV: &str = "ELA_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub dims: Vec<u32>,
    pub fids: Vec<u32>,
    pub iids: Vec<u32>,
    /// Base seed of the instance transforms.
    pub instance_seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            dims: DEFAULT_DIMS.to_vec(),
            fids: FUNCTION_IDS.to_vec(),
            iids: DEFAULT_IIDS.to_vec(),
            instance_seed: SeedScheme::default().base,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub learners: Vec<String>,
    pub paradigms: Vec<String>,
    pub feature_selection: Vec<String>,
    pub forest_trees: usize,
    pub ga_generations: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            learners: vec!["tree".into(), "forest".into(), "knn".into()],
            paradigms: vec!["classification".into(), "regression".into(), "pairwise".into()],
            feature_selection: vec!["none".into()],
            forest_trees: ForestParams::default().trees,
            ga_generations: GaParams::default().generations,
        }
    }
}

impl GridConfig {
    pub fn learners(&self) -> Result<Vec<LearnerConfig>> {
        self.learners
            .iter()
            .map(|l| {
                Ok(match l.parse::<LearnerConfig>().map_err(|e| Error::Config(e.to_string()))? {
                    LearnerConfig::Forest(p) => LearnerConfig::Forest(ForestParams { trees: self.forest_trees, ..p }),
                    other => other,
                })
            })
            .collect()
    }

    pub fn paradigms(&self) -> Result<Vec<Paradigm>> {
        self.paradigms.iter().map(|p| p.parse().map_err(|e: Error| Error::Config(e.to_string()))).collect()
    }

    pub fn strategies(&self) -> Result<Vec<FsStrategy>> {
        self.feature_selection
            .iter()
            .map(|s| {
                Ok(match s.parse::<FsStrategy>().map_err(|e| Error::Config(e.to_string()))? {
                    FsStrategy::Ga(g) => FsStrategy::Ga(GaParams { generations: self.ga_generations, ..g }),
                    other => other,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub out: PathBuf,
    /// Design size per dimension; features cost `design_mult * d` evaluations.
    pub design_mult: usize,
    pub epsilon: f64,
    pub top_k: usize,
    /// Run log to ingest; synthetic runs are generated when absent.
    pub runs: Option<PathBuf>,
    pub first_run_only: bool,
    pub suite: SuiteConfig,
    pub grid: GridConfig,
    pub features: FeatureConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 1,
            out: PathBuf::from("ela-out"),
            design_mult: 50,
            epsilon: 1e-2,
            top_k: 3,
            runs: None,
            first_run_only: true,
            suite: SuiteConfig::default(),
            grid: GridConfig::default(),
            features: FeatureConfig::default(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub design_mult: Option<usize>,
    pub out: Option<PathBuf>,
    pub runs: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PipelineConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn apply(mut self, o: &Overrides) -> Result<Self> {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.epsilon {
            self.epsilon = v;
        }
        if let Some(v) = o.design_mult {
            self.design_mult = v;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = &o.runs {
            self.runs = Some(v.clone());
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if self.design_mult < 1 {
            return bad("design_mult must be at least 1");
        }
        if self.top_k < 1 {
            return bad("top_k must be at least 1");
        }
        if self.suite.dims.is_empty() || self.suite.fids.is_empty() || self.suite.iids.is_empty() {
            return bad("suite dims, fids and iids must be non-empty");
        }
        self.grid.learners()?;
        self.grid.paradigms()?;
        self.grid.strategies()?;
        Ok(())
    }

    pub fn cost(&self) -> CostModel {
        CostModel { evals_per_dim: self.design_mult as f64 }
    }

    pub fn paths(&self) -> Artifacts {
        Artifacts { root: self.out.clone() }
    }

    fn instance_ids(&self) -> Vec<ProblemId> {
        let mut ids = Vec::new();
        for &d in &self.suite.dims {
            for &f in &self.suite.fids {
                for &i in &self.suite.iids {
                    ids.push(ProblemId::new(f, d, i));
                }
            }
        }
        ids.sort();
        ids.dedup();
        ids
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub root: PathBuf,
}

impl Artifacts {
    pub fn file(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn runs(&self) -> PathBuf {
        self.file("runs.csv")
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        write(&mut buf)?;
        buf.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_string(path: &Path, s: &str) -> Result<()> {
    write_atomic(path, |w| w.write_all(s.as_bytes()).map_err(|e| Error::io(path, e)))
}

fn open(path: &Path, hint: &str) -> Result<fs::File> {
    if !path.exists() {
        return Err(Error::MissingArtifact { path: path.to_path_buf(), hint: hint.to_string() });
    }
    fs::File::open(path).map_err(|e| Error::io(path, e))
}

/// Runs `f` on a pool sized by `ELA_WORKERS` when set.
pub fn with_workers<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Internal(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceCost {
    pub fid: u32,
    pub dim: u32,
    pub iid: u32,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturesMeta {
    pub schema_version: u32,
    pub schema_hash: String,
    pub n_features: usize,
    pub design_mult: usize,
    pub seed: u64,
    pub config: FeatureConfig,
    pub instances: Vec<InstanceCost>,
    pub total_evaluations: usize,
}

/// Writes the synthetic run log for the configured suite.
pub fn cmd_synthesize(config: &PipelineConfig) -> Result<PathBuf> {
    let recs = synthetic::runs(&config.instance_ids(), &synthetic::complementary_portfolio(), config.seed);
    let path = config.paths().runs();
    write_atomic(&path, |w| write_runs_csv(&recs, w))?;
    Ok(path)
}

/// Samples, evaluates and characterises every instance of the suite.
pub fn cmd_features(config: &PipelineConfig) -> Result<(FeatureMatrix, FeatureMatrix)> {
    let paths = config.paths();
    let s = &config.suite;
    let instances = suite(&s.dims, &s.fids, &s.iids, SeedScheme { base: s.instance_seed })?;
    write_atomic(&paths.file("manifest.csv"), |w| write_manifest_csv(&instances, w))?;
    let results = instances
        .par_iter()
        .map(|inst| {
            let id = inst.id();
            let wrap = |e: Error| Error::Instance { id: id.to_string(), source: Box::new(e) };
            let seed = rng::derive_seed(config.seed, &[id.fid() as u64, id.dim() as u64, id.iid() as u64]);
            let objective = CountingObjective::new(|x: &[f64]| inst.value(x));
            let fv = characterise(&objective, &inst.domain(), config.design_mult, seed, &config.features)
                .map_err(wrap)?;
            Ok((id, fv, objective.calls()))
        })
        .collect::<Result<Vec<_>>>()?;
    let costs = results
        .iter()
        .map(|(id, _, calls)| InstanceCost { fid: id.fid(), dim: id.dim(), iid: id.iid(), evaluations: *calls })
        .collect::<Vec<_>>();
    let per_instance = FeatureMatrix::from_vectors(results.into_iter().map(|(id, fv, _)| (id, fv)))?;
    let aggregated = aggregate_median(&per_instance)?;
    write_atomic(&paths.file("features/instances.csv"), |w| per_instance.write_csv(w))?;
    write_atomic(&paths.file("features/problems.csv"), |w| aggregated.write_csv(w))?;
    let names = schema(&config.features);
    let meta = FeaturesMeta {
        schema_version: SCHEMA_VERSION,
        schema_hash: schema_hash(&names),
        n_features: names.len(),
        design_mult: config.design_mult,
        seed: config.seed,
        config: config.features.clone(),
        total_evaluations: costs.iter().map(|c| c.evaluations).sum(),
        instances: costs,
    };
    write_atomic(&paths.file("features/meta.json"), |w| Ok(serde_json::to_writer_pretty(w, &meta)?))?;
    log::info!("features: {} instances, {} problems, {} features", per_instance.rows.len(), aggregated.rows.len(), names.len());
    Ok((per_instance, aggregated))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceOutput {
    pub full: PerformanceTable,
    pub portfolio: PerformanceTable,
    pub members: Vec<String>,
}

fn write_table(t: &PerformanceTable, dir: &Path, suffix: &str) -> Result<()> {
    write_atomic(&dir.join(format!("ert{suffix}.csv")), |w| t.write_ert_csv(w))?;
    write_atomic(&dir.join(format!("relert{suffix}.csv")), |w| t.write_relert_csv(w))?;
    write_atomic(&dir.join(format!("meta{suffix}.json")), |w| t.write_meta_json(w))
}

fn read_table(dir: &Path, suffix: &str) -> Result<PerformanceTable> {
    let hint = "run the `performance` command first";
    let ert = open(&dir.join(format!("ert{suffix}.csv")), hint)?;
    let meta = open(&dir.join(format!("meta{suffix}.json")), hint)?;
    PerformanceTable::read(std::io::BufReader::new(ert), std::io::BufReader::new(meta))
}

/// Ingests runs, checks them, and writes the ERT tables and the portfolio.
pub fn cmd_performance(config: &PipelineConfig) -> Result<PerformanceOutput> {
    let paths = config.paths();
    let runs_path = config.runs.clone().unwrap_or_else(|| paths.runs());
    if !runs_path.exists() {
        return Err(Error::MissingArtifact {
            path: runs_path,
            hint: "pass --runs FILE or run `run-all` to generate synthetic runs".into(),
        });
    }
    let mut records = restrict_iids(&parse_runs_csv(&runs_path)?, &config.suite.iids);
    if config.first_run_only {
        records = first_run_only(&records);
    }
    let report = sanity_check(&records, &config.suite.iids);
    let dir = paths.file("performance");
    write_string(&dir.join("sanity.txt"), &report.to_text())?;
    write_string(&dir.join("sanity.jsonl"), &report.to_jsonl()?)?;
    let valid = report.valid_solvers();
    if valid.is_empty() {
        return Err(Error::InvalidArgument("no solver passed the sanity checks".into()));
    }
    let full = relert_table(&records, Some(&valid), config.epsilon)?;
    let portfolio = build_portfolio(&full, config.top_k)?;
    let table = full.restrict(&portfolio.members)?;
    write_table(&full, &dir, "_all")?;
    write_table(&table, &dir, "")?;
    write_atomic(&dir.join("portfolio.json"), |w| Ok(serde_json::to_writer_pretty(w, &portfolio)?))?;
    let (s, m) = sbs(&table);
    log::info!(
        "performance: {} valid solvers, portfolio of {}, single best {s} ({m:.2}), penalty {}",
        valid.len(),
        portfolio.members.len(),
        table.penalty
    );
    Ok(PerformanceOutput { full, portfolio: table, members: portfolio.members })
}

fn read_problem_features(config: &PipelineConfig) -> Result<FeatureMatrix> {
    let f = open(&config.paths().file("features/problems.csv"), "run the `features` command first")?;
    FeatureMatrix::read_csv(std::io::BufReader::new(f), config.design_mult)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub rank: usize,
    pub kind: String,
    pub name: String,
    pub learner: String,
    pub paradigm: String,
    pub feature_selection: String,
    pub n_features: usize,
    pub mean_relert: f64,
    pub mean_relert_no_cost: f64,
    pub fs_evaluations: usize,
    pub seed: u64,
    pub mask: String,
    pub error: String,
}

pub fn read_leaderboard(path: &Path) -> Result<Vec<LeaderboardRow>> {
    let f = open(path, "run the `train` command first")?;
    let mut r = csv::Reader::from_reader(std::io::BufReader::new(f));
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutput {
    pub leaderboard: Vec<LeaderboardRow>,
    pub best: CvResult,
    pub best_name: String,
}

/// Grid search over learners, paradigms and feature selection; writes the
/// leaderboard, the best model and its cross-validated predictions.
pub fn cmd_train(config: &PipelineConfig) -> Result<TrainOutput> {
    let paths = config.paths();
    let features = read_problem_features(config)?;
    let table = read_table(&paths.file("performance"), "")?;
    let data = Dataset::new(&features, &table)?;
    let cost = config.cost();
    let entries = grid_search(
        &data,
        &config.grid.learners()?,
        &config.grid.paradigms()?,
        &config.grid.strategies()?,
        config.seed,
        cost,
    )?;
    let oracle = oracle_cv(&table, cost);
    let mut rows: Vec<LeaderboardRow> = entries
        .iter()
        .map(|e| LeaderboardRow {
            rank: 0,
            kind: "grid".into(),
            name: e.name(),
            learner: e.learner.id().into(),
            paradigm: e.paradigm.id().into(),
            feature_selection: e.strategy.id(),
            n_features: e.mask.iter().filter(|&&b| b).count(),
            mean_relert: e.score(),
            mean_relert_no_cost: e.cv.as_ref().map_or(f64::INFINITY, |c| c.mean_relert_no_cost),
            fs_evaluations: e.fs_evaluations,
            seed: e.seed,
            mask: e.mask.iter().map(|&b| if b { '1' } else { '0' }).collect(),
            error: e.error.clone().unwrap_or_default(),
        })
        .collect();
    rows.push(LeaderboardRow {
        rank: 0,
        kind: "oracle".into(),
        name: "oracle".into(),
        learner: String::new(),
        paradigm: String::new(),
        feature_selection: String::new(),
        n_features: 0,
        mean_relert: oracle.mean_relert,
        mean_relert_no_cost: oracle.mean_relert_no_cost,
        fs_evaluations: 0,
        seed: 0,
        mask: String::new(),
        error: String::new(),
    });
    rows.sort_by(|a, b| a.mean_relert.total_cmp(&b.mean_relert));
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    let dir = paths.file("train");
    write_atomic(&dir.join("leaderboard.csv"), |w| {
        let mut cw = csv::Writer::from_writer(w);
        for r in &rows {
            cw.serialize(r)?;
        }
        cw.flush().map_err(|e| Error::io("leaderboard.csv", e))
    })?;
    write_atomic(&dir.join("cv_oracle.csv"), |w| oracle.write_csv(w))?;
    let best = entries
        .iter()
        .find(|e| e.cv.is_some())
        .ok_or_else(|| Error::Internal("every grid cell failed".into()))?;
    let cv = best.cv.clone().expect("filtered on cv");
    write_atomic(&dir.join("cv_best.csv"), |w| cv.write_csv(w))?;
    let model = train(&data, best.paradigm, &best.learner, &best.mask, best.seed)?;
    write_atomic(&dir.join("best_model.json"), |w| model.write_json(w))?;
    log::info!("train: best selector {} with mean relERT {:.3}", best.name(), cv.mean_relert);
    Ok(TrainOutput { leaderboard: rows, best: cv, best_name: best.name() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOutput {
    pub summary: SummaryTable,
    pub confusion: Confusion,
}

/// Summary table, scatter data, confusion counts and ERT ratios.
pub fn cmd_report(config: &PipelineConfig) -> Result<ReportOutput> {
    let paths = config.paths();
    let perf = paths.file("performance");
    let table = read_table(&perf, "")?;
    let full = read_table(&perf, "_all")?;
    let leaderboard = read_leaderboard(&paths.file("train/leaderboard.csv"))?;
    let best_name = leaderboard
        .iter()
        .find(|r| r.kind == "grid" && r.error.is_empty())
        .map(|r| r.name.clone())
        .unwrap_or_else(|| "selector".into());
    let cv_file = open(&paths.file("train/cv_best.csv"), "run the `train` command first")?;
    let cv = CvResult::read_csv(std::io::BufReader::new(cv_file))?;
    let summary = SummaryTable::build(&table, &[SelectorColumn { name: best_name, cv: cv.clone() }])?;
    let labels = label_best(&table, config.seed);
    let confusion = Confusion::build(&table.solvers, &labels, &cv)?;
    let points = report::scatter(&table, &cv, config.cost())?;
    let ratios = report::vbs_ratios(&full, &table);
    let dir = paths.file("report");
    write_atomic(&dir.join("summary.csv"), |w| summary.write_csv(w))?;
    write_string(&dir.join("summary.md"), &summary.to_markdown())?;
    write_atomic(&dir.join("confusion.csv"), |w| confusion.write_csv(w))?;
    write_string(&dir.join("confusion.md"), &confusion.to_markdown())?;
    write_atomic(&dir.join("scatter.csv"), |w| report::write_scatter_csv(&points, w))?;
    write_atomic(&dir.join("vbs_ratio.csv"), |w| report::write_ratio_csv(&ratios, w))?;
    let mut dims: Vec<u32> = table.problems.iter().map(|p| p.dim).collect();
    dims.dedup();
    for d in &dims {
        let pts: Vec<_> = points.iter().filter(|p| p.problem.dim == *d).cloned().collect();
        write_string(&dir.join(format!("scatter_d{d}.svg")), &report::scatter_svg(&pts, &format!("d = {d}")))?;
    }
    let groups: Vec<(String, Vec<f64>)> = dims
        .iter()
        .map(|d| (d.to_string(), ratios.iter().filter(|(p, _)| p.dim == *d).map(|(_, r)| *r).collect()))
        .collect();
    write_string(&dir.join("vbs_ratio.svg"), &report::boxplot_svg(&groups, "portfolio best / overall best ERT"))?;
    Ok(ReportOutput { summary, confusion })
}

/// Every step in order; synthetic runs are generated when no runs file is
/// configured.
pub fn run_all(config: &PipelineConfig) -> Result<ReportOutput> {
    write_string(&config.paths().file("config.toml"), &config.to_toml()?)?;
    if config.runs.is_none() {
        cmd_synthesize(config)?;
    }
    cmd_features(config)?;
    cmd_performance(config)?;
    cmd_train(config)?;
    cmd_report(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = PipelineConfig::default();
        let back = PipelineConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(c.design_mult, 50);
        assert_eq!(c.epsilon, 1e-2);
        assert_eq!(c.top_k, 3);
    }

    #[test]
    fn flags_win_over_file() {
        let c = PipelineConfig::from_toml("seed = 5\nepsilon = 0.1\n[grid]\nlearners = [\"knn\"]\n").unwrap();
        assert_eq!(c.seed, 5);
        let c = c.apply(&Overrides { seed: Some(9), design_mult: Some(20), ..Default::default() }).unwrap();
        assert_eq!((c.seed, c.epsilon, c.design_mult), (9, 0.1, 20));
    }

    #[test]
    fn bad_config_is_rejected() {
        assert!(matches!(PipelineConfig::from_toml("nonsense = 1"), Err(Error::Config(_))));
        assert!(matches!(PipelineConfig::from_toml("[grid]\nlearners = [\"svm\"]"), Err(Error::Config(_))));
        assert!(matches!(PipelineConfig::from_toml("epsilon = -1.0"), Err(Error::Config(_))));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.txt");
        write_string(&p, "one").unwrap();
        write_string(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path().join("a")).unwrap().count(), 1);
    }

    #[test]
    fn missing_artifact_has_a_hint() {
        let dir = tempfile::tempdir().unwrap();
        let c = PipelineConfig { out: dir.path().to_path_buf(), ..Default::default() };
        match cmd_report(&c) {
            Err(Error::MissingArtifact { hint, .. }) => assert!(hint.contains("performance")),
            other => panic!("{other:?}"),
        }
    }
}
