//! Principal-component features of the design and of the design joined
//! with the objective values.

use nalgebra::DMatrix;

use super::{prefixed, FeatureVector};
use crate::error::{Error, Result};
use crate::linalg::{covariance, symmetric_eigenvalues_desc};
use crate::sampling::SampleDesign;

const EXPLAINED: f64 = 0.9;

pub fn names() -> Vec<String> {
    prefixed(
        "pca",
        &[
            "expl_var.cov_x",
            "expl_var.cor_x",
            "expl_var.cov_init",
            "expl_var.cor_init",
            "expl_var_pc1.cov_x",
            "expl_var_pc1.cor_x",
            "expl_var_pc1.cov_init",
            "expl_var_pc1.cor_init",
            "dropped_columns",
        ],
    )
}

/// `(k / p, share of the first component)` where `k` is the smallest number
/// of components explaining at least 90% of the variance.
pub fn explained(m: &DMatrix<f64>) -> (f64, f64) {
    let p = m.nrows();
    if p == 0 {
        return (f64::NAN, f64::NAN);
    }
    let ev = symmetric_eigenvalues_desc(m);
    let total: f64 = ev.iter().sum();
    if total <= 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let mut acc = 0.0;
    let mut k = p;
    for (i, v) in ev.iter().enumerate() {
        acc += v;
        if acc >= EXPLAINED * total * (1.0 - 1e-12) {
            k = i + 1;
            break;
        }
    }
    (k as f64 / p as f64, ev[0] / total)
}

/// Correlation matrix over the columns with non-zero variance.
fn correlation(cov: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let keep: Vec<usize> = (0..cov.nrows()).filter(|&i| cov[(i, i)] > 0.0).collect();
    let q = keep.len();
    let cor = DMatrix::from_fn(q, q, |a, b| {
        let (i, j) = (keep[a], keep[b]);
        if a == b {
            1.0
        } else {
            cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt()
        }
    });
    (cor, cov.nrows() - q)
}

pub fn pca(design: &SampleDesign) -> Result<FeatureVector> {
    let y = design.values()?;
    let (n, d) = (design.n(), design.dim());
    if n <= d {
        return Err(Error::InvalidArgument(format!("pca needs n > d, got n = {n}, d = {d}")));
    }
    let x = DMatrix::from_fn(n, d, |i, j| design.points[i][j]);
    let xy = DMatrix::from_fn(n, d + 1, |i, j| if j < d { design.points[i][j] } else { y[i] });
    let cov_x = covariance(&x);
    let cov_xy = covariance(&xy);
    let (cor_x, dropped_x) = correlation(&cov_x);
    let (cor_xy, dropped_xy) = correlation(&cov_xy);
    let parts = [explained(&cov_x), explained(&cor_x), explained(&cov_xy), explained(&cor_xy)];
    let mut values: Vec<f64> = parts.iter().map(|p| p.0).collect();
    values.extend(parts.iter().map(|p| p.1));
    values.push(dropped_x.max(dropped_xy) as f64);
    Ok(FeatureVector::new(names(), values, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{evaluate_design, improved_lhd, BoxDomain};

    #[test]
    fn line_in_five_dimensions() {
        let points: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 * 0.2 - 3.0; 5]).collect();
        let design = SampleDesign::from_parts(points, vec![1.0; 30], BoxDomain::bbob(5)).unwrap();
        let fv = pca(&design).unwrap();
        assert!((fv.get("pca.expl_var.cov_x").unwrap() - 0.2).abs() < 1e-12);
        assert!((fv.get("pca.expl_var_pc1.cov_x").unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(fv.get("pca.dropped_columns"), Some(1.0));
    }

    #[test]
    fn isotropic_plane_needs_both_components() {
        let design = improved_lhd(200, &BoxDomain::bbob(2), 9).unwrap();
        let ev = evaluate_design(&design, &|x: &[f64]| x[0]).unwrap();
        let fv = pca(&ev).unwrap();
        assert_eq!(fv.get("pca.expl_var.cov_x"), Some(1.0));
        assert_eq!(fv.get("pca.expl_var.cor_x"), Some(1.0));
    }

    #[test]
    fn correlation_variant_ignores_axis_scaling() {
        let design = improved_lhd(80, &BoxDomain::bbob(3), 2).unwrap();
        let f = |x: &[f64]| x[0] * x[0] + 2.0 * x[1] - x[2];
        let a = evaluate_design(&design, &f).unwrap();
        let scaled: Vec<Vec<f64>> =
            design.points.iter().map(|p| vec![p[0] * 3.0, p[1] * 0.5, p[2] * 7.0]).collect();
        let y = a.values().unwrap().to_vec();
        let b = SampleDesign::from_parts(scaled, y, BoxDomain::new(vec![-40.0; 3], vec![40.0; 3]).unwrap())
            .unwrap();
        let (fa, fb) = (pca(&a).unwrap(), pca(&b).unwrap());
        for name in ["pca.expl_var.cor_x", "pca.expl_var.cor_init"] {
            assert_eq!(fa.get(name), fb.get(name));
        }
        let pa = fa.get("pca.expl_var_pc1.cor_init").unwrap();
        assert!((pa - fb.get("pca.expl_var_pc1.cor_init").unwrap()).abs() < 1e-10);
    }
}
