//! Leave-one-function-out cross-validation of the three selector paradigms
//! on the synthetic scenario.

use ela_select::performance::sbs;
use ela_select::pipeline::{self, PipelineConfig};
use ela_select::selection::learner::ForestParams;
use ela_select::selection::{lofo_cv, CostModel, Dataset, LearnerConfig, Paradigm};

fn main() -> ela_select::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| ela_select::Error::io("tempdir", e))?;
    let config = PipelineConfig { out: dir.path().to_path_buf(), ..Default::default() };
    pipeline::cmd_synthesize(&config)?;
    let (_, features) = pipeline::cmd_features(&config)?;
    let table = pipeline::cmd_performance(&config)?.portfolio;
    let data = Dataset::new(&features, &table)?;
    let forest = LearnerConfig::Forest(ForestParams { trees: 200, ..Default::default() });
    let (name, mean) = sbs(&table);
    println!("SBS {name}: {mean:.3}");
    for paradigm in Paradigm::ALL {
        let cv = lofo_cv(&data, paradigm, &forest, &data.full_mask(), 1, CostModel::default())?;
        println!("forest/{:<15} {:.3} ({:.3} without feature cost)", paradigm.id(), cv.mean_relert, cv.mean_relert_no_cost);
    }
    Ok(())
}
