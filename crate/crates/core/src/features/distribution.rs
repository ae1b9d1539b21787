//! Shape of the distribution of objective values.

use super::{prefixed, stats, FeatureVector};
use crate::error::{Error, Result};
use crate::sampling::SampleDesign;

const KDE_GRID: usize = 512;

pub fn names() -> Vec<String> {
    prefixed("ela_distr", &["skewness", "kurtosis", "number_of_peaks"])
}

/// Moment skewness `m3 / m2^1.5` and excess kurtosis `m4 / m2^2 - 3`
/// (population central moments); NaN for constant samples.
pub fn moments(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let mean = stats::mean(y);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in y {
        let c = v - mean;
        let c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
}

/// Silverman's rule of thumb, `0.9 min(sd, IQR / 1.34) n^(-1/5)`, with the
/// usual fallbacks when the spread estimate is zero.
pub fn silverman_bandwidth(y: &[f64]) -> f64 {
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sd = stats::sd(y);
    let iqr = stats::quantile_sorted(&sorted, 0.75) - stats::quantile_sorted(&sorted, 0.25);
    let mut lo = sd.min(iqr / 1.34);
    if !(lo > 0.0) {
        lo = if sd > 0.0 {
            sd
        } else if sorted[0] != 0.0 {
            sorted[0].abs()
        } else {
            1.0
        };
    }
    0.9 * lo * (y.len() as f64).powf(-0.2)
}

/// Strict local maxima of a Gaussian KDE on a 512-point grid over
/// `[min y, max y]`; an end point counts when it exceeds its one neighbour.
pub fn kde_peaks(y: &[f64]) -> usize {
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return 1;
    }
    let bw = silverman_bandwidth(y);
    let density: Vec<f64> = (0..KDE_GRID)
        .map(|g| {
            let t = lo + (hi - lo) * g as f64 / (KDE_GRID - 1) as f64;
            y.iter()
                .map(|v| {
                    let u = (t - v) / bw;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
        })
        .collect();
    let last = KDE_GRID - 1;
    let peaks = (0..KDE_GRID)
        .filter(|&i| {
            let left = i == 0 || density[i] > density[i - 1];
            let right = i == last || density[i] > density[i + 1];
            left && right
        })
        .count();
    peaks.max(1)
}

pub fn ela_distribution(design: &SampleDesign) -> Result<FeatureVector> {
    let y = design.values()?;
    if y.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "y-distribution features need n >= 4, got {}",
            y.len()
        )));
    }
    let (skew, kurt) = moments(y);
    let peaks = kde_peaks(y) as f64;
    Ok(FeatureVector::new(names(), vec![skew, kurt, peaks], design.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn symmetric_two_point_sample() {
        let (s, k) = moments(&[-1.0, 1.0, -1.0, 1.0]);
        assert_eq!(s, 0.0);
        assert_eq!(k, -2.0);
    }

    #[test]
    fn skewed_sample_matches_hand_moments() {
        // m2 = 0.1875, m3 = 0.09375
        let (s, _) = moments(&[0.0, 0.0, 0.0, 1.0]);
        let expected = 0.09375 / 0.1875f64.powf(1.5);
        assert!((s - expected).abs() < 1e-12);
        assert!((s - 1.1547).abs() < 1e-4);
    }

    #[test]
    fn constant_sample() {
        let (s, k) = moments(&[2.0; 6]);
        assert!(s.is_nan() && k.is_nan());
        assert_eq!(kde_peaks(&[2.0; 6]), 1);
    }

    #[test]
    fn narrow_gaussian_has_one_peak() {
        let mut r = rng::rng(5);
        let y: Vec<f64> = (0..300).map(|_| 3.0 + 0.01 * r.sample::<f64, _>(StandardNormal)).collect();
        assert_eq!(kde_peaks(&y), 1);
    }

    #[test]
    fn well_separated_modes_are_counted() {
        let mut r = rng::rng(6);
        let y: Vec<f64> = (0..300)
            .map(|i| if i % 2 == 0 { 0.0 } else { 50.0 } + r.sample::<f64, _>(StandardNormal))
            .collect();
        assert_eq!(kde_peaks(&y), 2);
    }

    #[test]
    fn affine_transform_of_y() {
        let mut r = rng::rng(8);
        let y: Vec<f64> = (0..200).map(|_| r.random::<f64>().powi(3)).collect();
        let (s, k) = moments(&y);
        let t: Vec<f64> = y.iter().map(|v| 3.5 * v - 20.0).collect();
        let (s2, k2) = moments(&t);
        assert!((s - s2).abs() < 1e-10 && (k - k2).abs() < 1e-10);
        let neg: Vec<f64> = y.iter().map(|v| -2.0 * v + 1.0).collect();
        let (s3, k3) = moments(&neg);
        assert!((s + s3).abs() < 1e-10 && (k - k3).abs() < 1e-10);
    }
}
