//! Floating searches and the (10+5)-GA over a table where two of eight
//! features decide the best solver.

use ela_select::performance::PerformanceTable;
use ela_select::rng;
use ela_select::selection::{ga_fs, sfbs, sffs, CostModel, Dataset, GaParams, LearnerConfig, Paradigm};
use ela_select::ProblemKey;
use rand::Rng as _;

fn main() -> ela_select::Result<()> {
    let mut r = rng::rng(3);
    let problems: Vec<ProblemKey> = (0..24).map(|p| ProblemKey::new(1 + p % 12, [2, 10][p as usize / 12])).collect();
    let x: Vec<Vec<f64>> = (0..24).map(|_| (0..8).map(|_| r.random_range(0.0..1.0)).collect()).collect();
    let ert = vec![
        x.iter().map(|f| if f[3] < 0.5 { 100.0 } else { 900.0 }).collect(),
        x.iter().map(|f| if f[3] >= 0.5 && f[6] < 0.5 { 100.0 } else { 700.0 }).collect(),
        x.iter().map(|_| 400.0).collect(),
    ];
    let table = PerformanceTable::from_ert(vec!["a".into(), "b".into(), "c".into()], problems, ert, 1e-2)?;
    let names = (0..8).map(|j| format!("x{j}")).collect();
    let data = Dataset::from_parts(names, x, table)?;
    let learner: LearnerConfig = "knn".parse()?;
    let cost = CostModel::FREE;
    for out in [
        sffs(&data, Paradigm::Classification, &learner, 1, cost)?,
        sfbs(&data, Paradigm::Classification, &learner, 1, cost)?,
        ga_fs(&data, Paradigm::Classification, &learner, GaParams { generations: 30, ..Default::default() }, 1, cost)?,
    ] {
        let kept: Vec<String> = (0..8).filter(|&j| out.mask[j]).map(|j| format!("x{j}")).collect();
        println!("{:<8} {:.3} with [{}] after {} evaluations", out.strategy, out.score, kept.join(" "), out.evaluations);
    }
    Ok(())
}
