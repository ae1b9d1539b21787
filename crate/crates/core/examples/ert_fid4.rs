//! ERT of HCMA on the Bueche-Rastrigin function from five runs per dimension.

use ela_select::ingest::parse_runs_csv;
use ela_select::performance::ert;

fn main() -> ela_select::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/hcma_fid4.csv");
    let runs = parse_runs_csv(path)?;
    let best = [(2, 98.8), (3, 219.6), (5, 486.2), (10, 1067.8)];
    println!("{:>4} {:>10} {:>9} {:>8}", "dim", "ERT", "best ERT", "relERT");
    for (dim, vbs) in best {
        let e = ert(runs.iter().filter(|r| r.dim == dim), 1e-2).expect("solved");
        println!("{dim:>4} {e:>10.1} {vbs:>9.1} {:>8.1}", e / vbs);
    }
    Ok(())
}
