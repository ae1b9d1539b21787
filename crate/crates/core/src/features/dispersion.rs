//! Dispersion features: are the best points closer to each other than the
//! sample as a whole?

use rand::seq::SliceRandom;

use super::{stats, FeatureVector};
use crate::error::{Error, Result};
use crate::rng;
use crate::sampling::SampleDesign;

fn pct(q: f64) -> String {
    format!("{:02}", (q * 100.0).round() as u32)
}

pub fn names(quantiles: &[f64]) -> Vec<String> {
    let mut out = Vec::new();
    for &q in quantiles {
        let p = pct(q);
        for stat in ["ratio_mean", "ratio_median", "diff_mean", "diff_median"] {
            out.push(format!("disp.{stat}_{p}"));
        }
    }
    out
}

fn pairwise(points: &[&[f64]]) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            out.push(stats::euclidean(points[i], points[j]));
        }
    }
    out
}

/// Indices ordered by `y`, ties broken by a seeded permutation.
pub fn ranked_indices(y: &[f64], seed: u64) -> Vec<usize> {
    let mut tiebreak: Vec<usize> = (0..y.len()).collect();
    tiebreak.shuffle(&mut rng::rng(seed));
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]).then(tiebreak[a].cmp(&tiebreak[b])));
    order
}

/// For each `q`, compares pairwise distances among the best `ceil(q n)`
/// points against those among all points.
pub fn disp(design: &SampleDesign, quantiles: &[f64], seed: u64) -> Result<FeatureVector> {
    let y = design.values()?;
    let n = y.len();
    if n < 2 {
        return Err(Error::InvalidArgument("dispersion needs at least 2 points".into()));
    }
    let all: Vec<&[f64]> = design.points.iter().map(Vec::as_slice).collect();
    let all_d = pairwise(&all);
    let (all_mean, all_median) = (stats::mean(&all_d), stats::median(&all_d));
    let order = ranked_indices(y, seed);
    let mut values = Vec::with_capacity(4 * quantiles.len());
    for &q in quantiles {
        let k = ((q * n as f64) - 1e-9).ceil().max(0.0) as usize;
        if k < 2 {
            values.extend([f64::NAN; 4]);
            continue;
        }
        let mut chosen = order[..k.min(n)].to_vec();
        chosen.sort_unstable();
        let subset: Vec<&[f64]> = chosen.iter().map(|&i| all[i]).collect();
        let d = pairwise(&subset);
        let (m, med) = (stats::mean(&d), stats::median(&d));
        values.extend([m / all_mean, med / all_median, m - all_mean, med - all_median]);
    }
    Ok(FeatureVector::new(names(quantiles), values, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{evaluate_design, improved_lhd, BoxDomain};

    #[test]
    fn best_points_near_centre_cluster() {
        let design = improved_lhd(250, &BoxDomain::bbob(5), 2).unwrap();
        let ev = evaluate_design(&design, &|x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt()).unwrap();
        let fv = disp(&ev, &[0.02, 0.05, 0.10, 0.25], 0).unwrap();
        for name in fv.names.iter().filter(|n| n.contains("ratio")) {
            assert!(fv.get(name).unwrap() < 1.0, "{name}");
        }
        for name in fv.names.iter().filter(|n| n.contains("diff")) {
            assert!(fv.get(name).unwrap() < 0.0, "{name}");
        }
    }

    #[test]
    fn constant_y_gives_ratio_near_one() {
        let design = improved_lhd(250, &BoxDomain::bbob(5), 2).unwrap();
        let ev = evaluate_design(&design, &|_: &[f64]| 1.0).unwrap();
        let mut ratios = Vec::new();
        for seed in 0..20 {
            let fv = disp(&ev, &[0.25], seed).unwrap();
            ratios.push(fv.get("disp.ratio_mean_25").unwrap());
        }
        let m = stats::mean(&ratios);
        assert!((m - 1.0).abs() < 0.03, "{m}");
        assert_ne!(ratios[0], ratios[1]);
    }

    #[test]
    fn full_sample_ratio_is_exactly_one() {
        let design = improved_lhd(60, &BoxDomain::bbob(2), 2).unwrap();
        let ev = evaluate_design(&design, &|x: &[f64]| x[0]).unwrap();
        let fv = disp(&ev, &[1.0], 0).unwrap();
        assert_eq!(fv.names[0], "disp.ratio_mean_100");
        assert_eq!(fv.values[0], 1.0);
        assert_eq!(fv.values[1], 1.0);
        assert_eq!(fv.values[2], 0.0);
    }

    #[test]
    fn tiny_subset_is_nan() {
        let design = improved_lhd(30, &BoxDomain::bbob(2), 2).unwrap();
        let ev = evaluate_design(&design, &|x: &[f64]| x[0]).unwrap();
        let fv = disp(&ev, &[0.02, 0.5], 0).unwrap();
        assert!(fv.values[..4].iter().all(|v| v.is_nan()));
        assert!(fv.values[4..].iter().all(|v| v.is_finite()));
    }
}
