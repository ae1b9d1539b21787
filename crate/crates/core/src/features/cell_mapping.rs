//! Cell-mapping angle features on a `blocks^d` grid over the domain.
//!
//! Only occupied cells are stored, so high dimensions stay cheap.

use std::collections::BTreeMap;

use super::{prefixed, stats, FeatureVector};
use crate::error::{Error, Result};
use crate::sampling::{bin_of, BoxDomain, SampleDesign};

pub fn names() -> Vec<String> {
    prefixed(
        "cm_angle",
        &[
            "dist_ctr2best.mean",
            "dist_ctr2best.sd",
            "dist_ctr2worst.mean",
            "dist_ctr2worst.sd",
            "angle.mean",
            "angle.sd",
            "nonempty_fraction",
        ],
    )
}

pub fn cell_index(x: &[f64], domain: &BoxDomain, blocks: usize) -> Vec<usize> {
    (0..x.len()).map(|k| bin_of(x[k], domain.lower()[k], domain.width(k), blocks)).collect()
}

pub fn cell_center(index: &[usize], domain: &BoxDomain, blocks: usize) -> Vec<f64> {
    index
        .iter()
        .enumerate()
        .map(|(k, &i)| domain.lower()[k] + domain.width(k) * (i as f64 + 0.5) / blocks as f64)
        .collect()
}

/// Occupied cells mapped to the indices of their points.
pub fn occupied_cells(design: &SampleDesign, blocks: usize) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut cells: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, p) in design.points.iter().enumerate() {
        cells.entry(cell_index(p, &design.domain, blocks)).or_default().push(i);
    }
    cells
}

/// Angle in degrees between `a - c` and `b - c`; NaN if either is zero.
pub fn angle_at(c: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let u: Vec<f64> = a.iter().zip(c).map(|(x, y)| x - y).collect();
    let v: Vec<f64> = b.iter().zip(c).map(|(x, y)| x - y).collect();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return f64::NAN;
    }
    let diff = u.iter().zip(&v).map(|(a, b)| (a / nu - b / nv).powi(2)).sum::<f64>().sqrt();
    let sum = u.iter().zip(&v).map(|(a, b)| (a / nu + b / nv).powi(2)).sum::<f64>().sqrt();
    (2.0 * diff.atan2(sum)).to_degrees()
}

pub fn cm_angle(design: &SampleDesign, blocks: usize) -> Result<FeatureVector> {
    let y = design.values()?;
    if blocks < 2 {
        return Err(Error::InvalidArgument(format!("blocks per dimension must be >= 2, got {blocks}")));
    }
    if y.is_empty() {
        return Err(Error::InvalidArgument("cell mapping needs at least one point".into()));
    }
    let d = design.dim();
    let diag = (0..d)
        .map(|k| (design.domain.width(k) / blocks as f64).powi(2))
        .sum::<f64>()
        .sqrt();
    let cells = occupied_cells(design, blocks);
    let (mut to_best, mut to_worst, mut angles) = (Vec::new(), Vec::new(), Vec::new());
    for (index, members) in &cells {
        if members.len() < 2 {
            continue;
        }
        let mut best = members[0];
        let mut worst = members[0];
        for &i in members {
            if y[i] < y[best] {
                best = i;
            }
            if y[i] >= y[worst] {
                worst = i;
            }
        }
        let c = cell_center(index, &design.domain, blocks);
        let (pb, pw) = (&design.points[best], &design.points[worst]);
        to_best.push(stats::euclidean(&c, pb) / diag);
        to_worst.push(stats::euclidean(&c, pw) / diag);
        let a = angle_at(&c, pb, pw);
        if !a.is_nan() {
            angles.push(a);
        }
    }
    let summary = |v: &[f64]| if v.is_empty() { [f64::NAN; 2] } else { [stats::mean(v), stats::sd(v)] };
    let total = (blocks as f64).powi(d as i32);
    let mut values = Vec::with_capacity(7);
    values.extend(summary(&to_best));
    values.extend(summary(&to_worst));
    values.extend(summary(&angles));
    values.push(cells.len() as f64 / total);
    Ok(FeatureVector::new(names(), values, design.n()))
}
