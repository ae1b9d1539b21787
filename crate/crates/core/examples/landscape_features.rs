//! Features of a unimodal and a multimodal function, from the same budget.

use ela_select::features::{characterise, FeatureConfig};
use ela_select::problems::{make_instance, SeedScheme};
use ela_select::sampling::CountingObjective;

fn main() -> ela_select::Result<()> {
    let config = FeatureConfig::default();
    let shown = ["ela_meta.quad_simple.adj_r2", "nbc.nb_fitness.cor", "disp.ratio_mean_02", "ic.h_max", "pca.expl_var.cov_x"];
    println!("{:<8} {}", "fid", shown.join("  "));
    for fid in [1, 10, 3, 20] {
        let inst = make_instance(fid, 5, 1, SeedScheme::default())?;
        let f = CountingObjective::new(|x: &[f64]| inst.value(x));
        let fv = characterise(&f, &inst.domain(), 50, 1, &config)?;
        let values: Vec<String> = shown.iter().map(|n| format!("{:>w$.3}", fv.get(n).unwrap(), w = n.len())).collect();
        println!("{:<8} {}   ({} evaluations)", fid, values.join("  "), f.calls());
    }
    Ok(())
}
