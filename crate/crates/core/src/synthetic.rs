//! Seeded solver run logs for a complementary three-solver portfolio.
//!
//! `uni_specialist` is fast on the unimodal functions and slow on the
//! multimodal ones, `multi_specialist` is the reverse and `generalist` is
//! moderately fast everywhere. The generalist is the single best solver; a
//! selector that tells the two function classes apart beats it clearly.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ingest::RunRecord;
use crate::problems::{ProblemId, UNIMODAL_IDS};
use crate::rng;

/// Behaviour of a solver on one class of functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Behaviour {
    /// Median evaluations per dimension of a successful run.
    pub evals_per_dim: f64,
    /// Log-normal spread of the evaluation count.
    pub spread: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverProfile {
    pub name: String,
    pub unimodal: Behaviour,
    pub multimodal: Behaviour,
}

impl SolverProfile {
    pub fn behaviour(&self, fid: u32) -> Behaviour {
        if UNIMODAL_IDS.contains(&fid) {
            self.unimodal
        } else {
            self.multimodal
        }
    }
}

pub fn complementary_portfolio() -> Vec<SolverProfile> {
    let fast = Behaviour { evals_per_dim: 1000.0, spread: 0.3, success_rate: 1.0 };
    let poor = Behaviour { evals_per_dim: 8000.0, spread: 0.3, success_rate: 1.0 };
    let steady = Behaviour { evals_per_dim: 3000.0, spread: 0.3, success_rate: 1.0 };
    vec![
        SolverProfile { name: "uni_specialist".into(), unimodal: fast, multimodal: poor },
        SolverProfile { name: "multi_specialist".into(), unimodal: poor, multimodal: fast },
        SolverProfile { name: "generalist".into(), unimodal: steady, multimodal: steady },
    ]
}

/// Factor by which a failed run overshoots the median successful run.
pub const FAILED_RUN_FACTOR: f64 = 5.0;

/// One run per solver and instance. Successful runs end with a gap in
/// `[1e-8, 1e-3]`, failed runs with a gap in `[1e-1, 1e2]`.
pub fn runs(instances: &[ProblemId], solvers: &[SolverProfile], seed: u64) -> Vec<RunRecord> {
    let mut out = Vec::with_capacity(instances.len() * solvers.len());
    for (s, prof) in solvers.iter().enumerate() {
        for id in instances {
            let mut r = rng::rng(rng::derive_seed(seed, &[s as u64, id.fid() as u64, id.dim() as u64, id.iid() as u64]));
            let b = prof.behaviour(id.fid());
            let z: f64 = StandardNormal.sample(&mut r);
            let median = b.evals_per_dim * id.dim() as f64;
            let ok = r.random_bool(b.success_rate);
            let (fe, gap) = if ok {
                (median * (b.spread * z).exp(), 10f64.powf(r.random_range(-8.0..-3.0)))
            } else {
                (FAILED_RUN_FACTOR * median * (b.spread * z).exp(), 10f64.powf(r.random_range(-1.0..2.0)))
            };
            out.push(RunRecord {
                solver: prof.name.clone(),
                fid: id.fid(),
                dim: id.dim(),
                iid: id.iid(),
                run: 1,
                fe_count: fe.round().max(1.0) as u64,
                best_gap: gap,
                budget_exhausted: !ok,
            });
        }
    }
    out
}
