//! Synthetic BBOB-style test functions with seeded instances.
//!
//! An instance evaluates `base(R (x - x_opt)) + y_opt`, where every base
//! function attains its minimum 0 at the origin. Instance `iid = 0` is the
//! untransformed base function. Other instances draw the shift uniformly
//! from the central 80% of `[-5, 5]^d`, the rotation by QR-decomposing a
//! Gaussian matrix, and an additive offset `y_opt` rounded to two decimals.
//! Separable functions (1, 3, 4, 5, 20) keep the identity rotation. The
//! linear slope (5) is not shifted: its optimum is a corner of the box
//! chosen by random signs.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::key::ProblemKey;
use crate::rng;
use crate::sampling::{BoxDomain, Objective};

/// Implemented function ids.
pub const FUNCTION_IDS: [u32; 10] = [1, 3, 4, 5, 8, 10, 14, 17, 20, 24];

/// Function ids considered unimodal within [`FUNCTION_IDS`].
pub const UNIMODAL_IDS: [u32; 5] = [1, 5, 8, 10, 14];

pub const DEFAULT_DIMS: [u32; 4] = [2, 3, 5, 10];
pub const DEFAULT_IIDS: [u32; 5] = [1, 2, 3, 4, 5];

/// `(fid, dim, iid)`; ordered by dimension, then function, then instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProblemId {
    dim: u32,
    fid: u32,
    iid: u32,
}

impl ProblemId {
    pub fn new(fid: u32, dim: u32, iid: u32) -> Self {
        ProblemId { dim, fid, iid }
    }
    pub fn fid(&self) -> u32 {
        self.fid
    }
    pub fn dim(&self) -> u32 {
        self.dim
    }
    pub fn iid(&self) -> u32 {
        self.iid
    }
    pub fn problem(&self) -> ProblemKey {
        ProblemKey::new(self.fid, self.dim)
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}/d{}/i{}", self.fid, self.dim, self.iid)
    }
}

/// How instance transforms are seeded: the seed of `(fid, dim, iid)` is
/// derived from `base`, so a different `base` yields a different suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedScheme {
    pub base: u64,
}

impl Default for SeedScheme {
    fn default() -> Self {
        SeedScheme { base: 0x00C0_C0BB_0B2D }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum Base {
    Sphere,
    Rastrigin,
    BuecheRastrigin,
    LinearSlope,
    Rosenbrock,
    Ellipsoidal,
    DifferentPowers,
    SchaffersF7,
    Schwefel,
    LunacekBiRastrigin,
}

impl Base {
    fn from_fid(fid: u32) -> Result<Self> {
        Ok(match fid {
            1 => Base::Sphere,
            3 => Base::Rastrigin,
            4 => Base::BuecheRastrigin,
            5 => Base::LinearSlope,
            8 => Base::Rosenbrock,
            10 => Base::Ellipsoidal,
            14 => Base::DifferentPowers,
            17 => Base::SchaffersF7,
            20 => Base::Schwefel,
            24 => Base::LunacekBiRastrigin,
            other => return Err(Error::UnsupportedFunction(other)),
        })
    }

    fn rotated(self) -> bool {
        matches!(
            self,
            Base::Rosenbrock
                | Base::Ellipsoidal
                | Base::DifferentPowers
                | Base::SchaffersF7
                | Base::LunacekBiRastrigin
        )
    }
}

/// `10^(e * i / (d - 1))`, with the exponent taken as 0 in one dimension.
fn conditioning(e: f64, i: usize, d: usize) -> f64 {
    if d == 1 {
        1.0
    } else {
        10f64.powf(e * i as f64 / (d - 1) as f64)
    }
}

fn rastrigin_core(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    10.0 * (d - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>())
        + z.iter().map(|v| v * v).sum::<f64>()
}

/// Optimum of `t sin(sqrt|t|)` on `[-500, 500]`.
const SCHWEFEL_ARGMAX: f64 = 420.968_746_359_982;

fn schwefel_term(t: f64) -> f64 {
    t * t.abs().sqrt().sin()
}

const LUNACEK_MU0: f64 = 2.5;

/// Base functions in `z`-space; each is zero at `z = 0` and non-negative.
fn evaluate_base(base: Base, z: &[f64], slope_signs: &[f64]) -> f64 {
    let d = z.len();
    match base {
        Base::Sphere => z.iter().map(|v| v * v).sum(),
        Base::Rastrigin => rastrigin_core(z),
        Base::BuecheRastrigin => {
            let s: Vec<f64> = z
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let scale = conditioning(0.5, i, d);
                    if i % 2 == 0 && v > 0.0 {
                        10.0 * scale * v
                    } else {
                        scale * v
                    }
                })
                .collect();
            rastrigin_core(&s)
        }
        Base::LinearSlope => z
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let s = slope_signs[i] * conditioning(1.0, i, d);
                let x_opt = 5.0 * slope_signs[i];
                // beyond the optimum the slope is flat
                let v = if x_opt * v < 25.0 { v } else { x_opt };
                5.0 * s.abs() - s * v
            })
            .sum(),
        Base::Rosenbrock => {
            let scale = (d as f64).sqrt().max(8.0) / 8.0;
            let w: Vec<f64> = z.iter().map(|v| scale * v + 1.0).collect();
            if d == 1 {
                return (w[0] - 1.0).powi(2);
            }
            w.windows(2)
                .map(|p| 100.0 * (p[0] * p[0] - p[1]).powi(2) + (p[0] - 1.0).powi(2))
                .sum()
        }
        Base::Ellipsoidal => z
            .iter()
            .enumerate()
            .map(|(i, v)| conditioning(6.0, i, d) * v * v)
            .sum(),
        Base::DifferentPowers => z
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let e = if d == 1 { 2.0 } else { 2.0 + 4.0 * i as f64 / (d - 1) as f64 };
                v.abs().powf(e)
            })
            .sum::<f64>()
            .sqrt(),
        Base::SchaffersF7 => {
            let w: Vec<f64> = z
                .iter()
                .enumerate()
                .map(|(i, v)| conditioning(1.0, i, d).sqrt() * v)
                .collect();
            let s: Vec<f64> = if d == 1 {
                vec![w[0].abs()]
            } else {
                w.windows(2).map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt()).collect()
            };
            let m = s.len() as f64;
            let sum: f64 = s
                .iter()
                .map(|&si| si.sqrt() + si.sqrt() * (50.0 * si.powf(0.2)).sin().powi(2))
                .sum();
            (sum / m).powi(2)
        }
        Base::Schwefel => {
            let peak = schwefel_term(SCHWEFEL_ARGMAX);
            z.iter()
                .map(|&v| {
                    let t = 100.0 * v + SCHWEFEL_ARGMAX;
                    let outside = (t.abs() - 500.0).max(0.0);
                    peak - schwefel_term(t) + outside * outside
                })
                .sum::<f64>()
                / d as f64
        }
        Base::LunacekBiRastrigin => {
            let df = d as f64;
            let s = 1.0 - 1.0 / (2.0 * (df + 20.0).sqrt() - 8.2);
            let mu1 = -((LUNACEK_MU0 * LUNACEK_MU0 - 1.0) / s).sqrt();
            let first: f64 = z.iter().map(|v| v * v).sum();
            let second: f64 = df
                + s * z
                    .iter()
                    .map(|v| (v + LUNACEK_MU0 - mu1).powi(2))
                    .sum::<f64>();
            first.min(second)
                + 10.0 * (df - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>())
        }
    }
}

/// One seeded instance of a test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    id: ProblemId,
    base: Base,
    x_opt: Vec<f64>,
    y_opt: f64,
    /// Row-major `d x d` orthonormal matrix.
    rotation: Vec<f64>,
    slope_signs: Vec<f64>,
}

impl ProblemInstance {
    pub fn id(&self) -> ProblemId {
        self.id
    }
    pub fn x_opt(&self) -> &[f64] {
        &self.x_opt
    }
    pub fn y_opt(&self) -> f64 {
        self.y_opt
    }
    pub fn domain(&self) -> BoxDomain {
        BoxDomain::bbob(self.id.dim as usize)
    }

    pub fn rotation(&self) -> DMatrix<f64> {
        let d = self.id.dim as usize;
        DMatrix::from_row_slice(d, d, &self.rotation)
    }

    /// Map `x` into the base function's coordinates.
    pub fn to_base_coordinates(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        let shifted: Vec<f64> = x.iter().zip(&self.x_opt).map(|(a, b)| a - b).collect();
        if self.base == Base::LinearSlope {
            return x.to_vec();
        }
        (0..d)
            .map(|r| {
                self.rotation[r * d..(r + 1) * d]
                    .iter()
                    .zip(&shifted)
                    .map(|(q, s)| q * s)
                    .sum()
            })
            .collect()
    }

    /// Value of the untransformed base function at base coordinates `z`.
    pub fn base_value(&self, z: &[f64]) -> f64 {
        evaluate_base(self.base, z, &self.slope_signs)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.id.dim as usize, "dimension mismatch");
        self.base_value(&self.to_base_coordinates(x)) + self.y_opt
    }
}

impl Objective for ProblemInstance {
    fn evaluate(&self, x: &[f64]) -> f64 {
        self.value(x)
    }
}

/// Haar-distributed orthonormal matrix from the QR factors of a Gaussian matrix.
pub fn random_rotation(dim: usize, rng: &mut rng::Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

/// Build instance `iid` of function `fid` in `dim` dimensions.
pub fn make_instance(fid: u32, dim: u32, iid: u32, seeds: SeedScheme) -> Result<ProblemInstance> {
    let base = Base::from_fid(fid)?;
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let d = dim as usize;
    let id = ProblemId::new(fid, dim, iid);
    let mut identity = vec![0.0; d * d];
    for i in 0..d {
        identity[i * d + i] = 1.0;
    }

    if iid == 0 {
        let slope_signs = vec![1.0; d];
        let x_opt = if base == Base::LinearSlope { vec![5.0; d] } else { vec![0.0; d] };
        return Ok(ProblemInstance {
            id,
            base,
            x_opt,
            y_opt: 0.0,
            rotation: identity,
            slope_signs,
        });
    }

    let mut rng = rng::rng(rng::derive_seed(seeds.base, &[fid as u64, dim as u64, iid as u64]));
    let slope_signs: Vec<f64> = (0..d)
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let x_opt: Vec<f64> = if base == Base::LinearSlope {
        slope_signs.iter().map(|s| 5.0 * s).collect()
    } else {
        (0..d).map(|_| rng.random_range(-4.0..4.0)).collect()
    };
    let rotation = if base.rotated() {
        let q = random_rotation(d, &mut rng);
        let mut rows = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                rows.push(q[(r, c)]);
            }
        }
        rows
    } else {
        identity
    };
    let y_opt = (rng.random_range(-100.0..100.0_f64) * 100.0).round() / 100.0;
    Ok(ProblemInstance {
        id,
        base,
        x_opt,
        y_opt,
        rotation,
        slope_signs,
    })
}

/// Cartesian product of instances ordered by `(dim, fid, iid)`.
pub fn suite(dims: &[u32], fids: &[u32], iids: &[u32], seeds: SeedScheme) -> Result<Vec<ProblemInstance>> {
    if dims.is_empty() || fids.is_empty() || iids.is_empty() {
        return Err(Error::InvalidArgument("suite axes must be non-empty".into()));
    }
    let mut ids = Vec::with_capacity(dims.len() * fids.len() * iids.len());
    for &dim in dims {
        for &fid in fids {
            for &iid in iids {
                ids.push(ProblemId::new(fid, dim, iid));
            }
        }
    }
    ids.sort();
    ids.dedup();
    ids.into_iter()
        .map(|id| make_instance(id.fid, id.dim, id.iid, seeds))
        .collect()
}

/// `fid,dim,iid,y_opt`.
pub fn write_manifest_csv<W: Write>(instances: &[ProblemInstance], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["fid", "dim", "iid", "y_opt"])?;
    for inst in instances {
        let id = inst.id();
        w.write_record([
            id.fid.to_string(),
            id.dim.to_string(),
            id.iid.to_string(),
            inst.y_opt.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<manifest csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeds() -> SeedScheme {
        SeedScheme::default()
    }

    #[test]
    fn base_sphere_at_origin() {
        let inst = make_instance(1, 2, 0, seeds()).unwrap();
        assert_eq!(inst.value(&[0.0, 0.0]), 0.0);
        assert_eq!(inst.value(&[1.0, 2.0]), 5.0);
    }

    #[test]
    fn linear_slope_optimum_on_corner() {
        let inst = make_instance(5, 3, 0, seeds()).unwrap();
        assert!(inst.x_opt().iter().all(|v| v.abs() == 5.0));
        assert_eq!(inst.value(inst.x_opt()), inst.y_opt());
        let inst = make_instance(5, 3, 4, seeds()).unwrap();
        assert!(inst.x_opt().iter().all(|v| v.abs() == 5.0));
        let f = inst.value(inst.x_opt());
        assert_eq!(f, inst.y_opt());
        // every interior point is worse
        assert!(inst.value(&[0.0, 0.0, 0.0]) > f);
    }

    #[test]
    fn rastrigin_instances_differ_but_hit_optimum() {
        let a = make_instance(3, 2, 2, seeds()).unwrap();
        let b = make_instance(3, 2, 3, seeds()).unwrap();
        assert_ne!(a.x_opt(), b.x_opt());
        assert!((a.value(a.x_opt()) - a.y_opt()).abs() <= 1e-12);
        assert!((b.value(b.x_opt()) - b.y_opt()).abs() <= 1e-12);
    }

    #[test]
    fn unknown_fid_rejected() {
        assert!(matches!(
            make_instance(2, 2, 1, seeds()),
            Err(Error::UnsupportedFunction(2))
        ));
    }

    #[test]
    fn suite_counts_and_ordering() {
        assert_eq!(suite(&[2], &[1], &[1, 2, 3, 4, 5], seeds()).unwrap().len(), 5);
        let all = suite(&DEFAULT_DIMS, &FUNCTION_IDS, &DEFAULT_IIDS, seeds()).unwrap();
        assert_eq!(all.len(), 200);
        assert!(all.windows(2).all(|w| w[0].id() < w[1].id()));
        for inst in &all {
            let err = (inst.value(inst.x_opt()) - inst.y_opt()).abs();
            assert!(err <= 1e-12, "{}: {err}", inst.id());
            assert!(inst.x_opt().iter().all(|v| v.abs() <= 5.0));
        }
        assert!(suite(&[], &[1], &[1], seeds()).is_err());
    }

    #[test]
    fn rotations_are_orthonormal() {
        for fid in [8, 10, 14, 17, 24] {
            for dim in DEFAULT_DIMS {
                let q = make_instance(fid, dim, 1, seeds()).unwrap().rotation();
                let eye = q.transpose() * &q;
                let d = dim as usize;
                for r in 0..d {
                    for c in 0..d {
                        let target = if r == c { 1.0 } else { 0.0 };
                        assert!((eye[(r, c)] - target).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn transform_is_shift_rotate_offset() {
        let mut rng = rng::rng(3);
        for fid in FUNCTION_IDS {
            let inst = make_instance(fid, 5, 2, seeds()).unwrap();
            let q = inst.rotation();
            for _ in 0..20 {
                let z: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
                let x: Vec<f64> = if fid == 5 {
                    z.clone()
                } else {
                    let rz = q.transpose() * nalgebra::DVector::from_vec(z.clone());
                    rz.iter().zip(inst.x_opt()).map(|(a, b)| a + b).collect()
                };
                let lhs = inst.value(&x) - inst.y_opt();
                let rhs = inst.base_value(&z);
                assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "fid {fid}");
            }
        }
    }

    #[test]
    fn base_functions_are_nonnegative() {
        let mut rng = rng::rng(4);
        for fid in FUNCTION_IDS {
            for dim in [1, 2, 5] {
                let inst = make_instance(fid, dim, 0, seeds()).unwrap();
                for _ in 0..200 {
                    let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
                    assert!(inst.value(&x) >= -1e-12, "fid {fid} dim {dim}");
                }
            }
        }
    }

    #[test]
    fn manifest_has_header() {
        let all = suite(&[2], &[1, 3], &[1], seeds()).unwrap();
        let mut buf = Vec::new();
        write_manifest_csv(&all, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("fid,dim,iid,y_opt"));
        assert_eq!(lines.count(), 2);
    }
}
