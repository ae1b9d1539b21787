//! ERT table, penalty, portfolio, VBS and SBS of a synthetic run log.

use ela_select::performance::{build_portfolio, relert_table, sbs, vbs};
use ela_select::problems::{ProblemId, DEFAULT_DIMS, DEFAULT_IIDS, FUNCTION_IDS};
use ela_select::synthetic::{complementary_portfolio, runs};

fn main() -> ela_select::Result<()> {
    let mut ids = Vec::new();
    for &d in &DEFAULT_DIMS {
        for &f in &FUNCTION_IDS {
            for &i in &DEFAULT_IIDS {
                ids.push(ProblemId::new(f, d, i));
            }
        }
    }
    let records = runs(&ids, &complementary_portfolio(), 1);
    let table = relert_table(&records, None, 1e-2)?;
    println!("{} solvers x {} problems, penalty {:.1}", table.n_solvers(), table.n_problems(), table.penalty);
    let portfolio = build_portfolio(&table, 2)?;
    println!("top-2 portfolio: {}", portfolio.members.join(", "));
    for s in 0..table.n_solvers() {
        println!("  {:<18} mean relERT {:.3}", table.solvers[s], table.mean_relert(s));
    }
    let (name, mean) = sbs(&table);
    println!("VBS {:.3}, SBS {name} {mean:.3}", vbs(&table).mean_relert);
    Ok(())
}
