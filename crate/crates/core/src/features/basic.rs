//! Basic descriptors of the design itself.

use super::{prefixed, FeatureVector};
use crate::error::Result;
use crate::sampling::SampleDesign;

pub fn names() -> Vec<String> {
    prefixed("basic", &["dim", "n", "lower_min", "upper_max", "best", "worst"])
}

pub fn basic(design: &SampleDesign) -> Result<FeatureVector> {
    let y = design.values()?;
    let best = y.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lower_min = design.domain.lower().iter().copied().fold(f64::INFINITY, f64::min);
    let upper_max = design.domain.upper().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FeatureVector::new(
        names(),
        vec![design.dim() as f64, design.n() as f64, lower_min, upper_max, best, worst],
        design.n(),
    ))
}
