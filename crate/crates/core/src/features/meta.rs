//! Meta-model features: fit quality and coefficients of simple regression
//! models of `y` on the design.

use nalgebra::{DMatrix, DVector};

use super::{prefixed, stats, FeatureVector};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::sampling::SampleDesign;

pub fn names() -> Vec<String> {
    prefixed(
        "ela_meta",
        &[
            "lin_simple.adj_r2",
            "lin_simple.coef.min",
            "lin_simple.coef.max",
            "lin_simple.coef.max_by_min",
            "quad_simple.adj_r2",
            "quad_simple.cond",
            "rank_deficient",
        ],
    )
}

/// Adjusted R^2 with `predictors` non-intercept terms; NaN for constant `y`.
fn adjusted_r2(y: &[f64], fitted: &DVector<f64>, predictors: usize) -> f64 {
    let n = y.len() as f64;
    let m = stats::mean(y);
    let sst: f64 = y.iter().map(|v| (v - m) * (v - m)).sum();
    if sst == 0.0 {
        return f64::NAN;
    }
    let sse: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    let r2 = 1.0 - sse / sst;
    1.0 - (1.0 - r2) * (n - 1.0) / (n - predictors as f64 - 1.0)
}

pub fn ela_meta(design: &SampleDesign) -> Result<FeatureVector> {
    let y = design.values()?;
    let (n, d) = (design.n(), design.dim());
    if n < d + 2 {
        return Err(Error::InvalidArgument(format!(
            "meta-model features need n >= d + 2 = {}, got {n}",
            d + 2
        )));
    }
    let quad_ok = n >= 2 * d + 2;
    let yv = DVector::from_column_slice(y);
    let lin = DMatrix::from_fn(n, d + 1, |i, j| if j == 0 { 1.0 } else { design.points[i][j - 1] });
    let quad = DMatrix::from_fn(n, 2 * d + 1, |i, j| match j {
        0 => 1.0,
        j if j <= d => design.points[i][j - 1],
        j => design.points[i][j - d - 1].powi(2),
    });
    let lin_fit = least_squares(&lin, &yv);
    let quad_fit = least_squares(&quad, &yv);
    let rank_deficient = lin_fit.rank < d + 1 || (quad_ok && quad_fit.rank < 2 * d + 1);

    let lin_abs: Vec<f64> = lin_fit.coef.iter().skip(1).map(|c| c.abs()).collect();
    let quad_abs: Vec<f64> = quad_fit.coef.iter().skip(d + 1).map(|c| c.abs()).collect();
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let values = vec![
        adjusted_r2(y, &lin_fit.fitted, d),
        min(&lin_abs),
        max(&lin_abs),
        stats::ratio(max(&lin_abs), min(&lin_abs)),
        if quad_ok { adjusted_r2(y, &quad_fit.fitted, 2 * d) } else { f64::NAN },
        if quad_ok { stats::ratio(max(&quad_abs), min(&quad_abs)) } else { f64::NAN },
        if rank_deficient { 1.0 } else { 0.0 },
    ];
    Ok(FeatureVector::new(names(), values, n))
}
