//! The whole pipeline on a reduced synthetic suite; artifacts go to the
//! directory given as the first argument (a temporary one by default).

use std::path::PathBuf;

use ela_select::pipeline::{run_all, GridConfig, PipelineConfig, SuiteConfig};

fn main() -> ela_select::Result<()> {
    let tmp = tempfile::tempdir().map_err(|e| ela_select::Error::io("tempdir", e))?;
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| tmp.path().to_path_buf());
    let config = PipelineConfig {
        out: out.clone(),
        suite: SuiteConfig { dims: vec![2, 3], ..Default::default() },
        grid: GridConfig { forest_trees: 100, ..Default::default() },
        ..Default::default()
    };
    let report = run_all(&config)?;
    print!("{}", report.summary.to_markdown());
    println!();
    print!("{}", report.confusion.to_markdown());
    println!("\nartifacts in {}", out.display());
    Ok(())
}
