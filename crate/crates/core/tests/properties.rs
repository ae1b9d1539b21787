use std::collections::BTreeSet;

use ela_select::features::cell_mapping::angle_at;
use ela_select::features::ic::{entropy, tour};
use ela_select::ingest::{read_runs_csv, write_runs_csv, RunRecord};
use ela_select::performance::{build_portfolio, competition_ranks, ert, vbs, PerformanceTable};
use ela_select::sampling::{bin_of, improved_lhd, BoxDomain};
use ela_select::selection::learner::KnnParams;
use ela_select::selection::{label_best, lofo_cv, CostModel, Dataset, LearnerConfig, Paradigm};
use ela_select::{rng, ProblemKey};
use proptest::prelude::*;

fn ert_matrix() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (1usize..6, 1usize..12).prop_flat_map(|(ns, np)| {
        let cell = prop_oneof![1 => Just(f64::INFINITY), 4 => 1.0f64..1e6];
        (Just(ns), Just(np), proptest::collection::vec(cell, ns * np))
    })
}

fn table(ns: usize, np: usize, flat: &[f64]) -> PerformanceTable {
    let solvers = (0..ns).map(|s| format!("s{s}")).collect();
    let problems = (0..np).map(|p| ProblemKey::new(1 + (p % 6) as u32, [2, 5][p / 6])).collect();
    let ert = flat.chunks(np).map(|c| c.to_vec()).collect();
    PerformanceTable::from_ert(solvers, problems, ert, 1e-2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lhd_has_one_point_per_bin(n in 2usize..40, d in 1usize..5, seed in any::<u64>()) {
        let domain = BoxDomain::bbob(d);
        let design = improved_lhd(n, &domain, seed).unwrap();
        prop_assert_eq!(design.n(), n);
        for k in 0..d {
            let bins: BTreeSet<usize> = design
                .points
                .iter()
                .map(|p| bin_of(p[k], domain.lower()[k], domain.width(k), n))
                .collect();
            prop_assert_eq!(bins.len(), n);
        }
        prop_assert!(design.points.iter().all(|p| domain.contains(p)));
        prop_assert_eq!(improved_lhd(n, &domain, seed).unwrap(), design);
    }

    #[test]
    fn runs_round_trip(rows in proptest::collection::vec((1u32..25, 1u32..6, 1u64..10_000_000, 0.0f64..1e3), 1..30)) {
        let recs: Vec<RunRecord> = rows
            .iter()
            .enumerate()
            .map(|(i, &(fid, iid, fe, gap))| RunRecord::new("A", fid, 3, iid, i as u32 + 1, fe, gap))
            .collect();
        let mut buf = Vec::new();
        write_runs_csv(&recs, &mut buf).unwrap();
        prop_assert_eq!(read_runs_csv(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn ert_scales_with_evaluations(fes in proptest::collection::vec(1u64..100_000, 1..10), k in 1u64..50) {
        let recs: Vec<RunRecord> = fes.iter().enumerate().map(|(i, &f)| RunRecord::new("A", 1, 2, i as u32, 1, f, 0.0)).collect();
        let scaled: Vec<RunRecord> = recs.iter().map(|r| RunRecord { fe_count: r.fe_count * k, ..r.clone() }).collect();
        let a = ert(&recs, 1e-2).unwrap();
        let b = ert(&scaled, 1e-2).unwrap();
        prop_assert!((b - k as f64 * a).abs() <= 1e-9 * b);
    }

    #[test]
    fn relert_axioms((ns, np, flat) in ert_matrix()) {
        let t = table(ns, np, &flat);
        prop_assume!(t.n_problems() > 0);
        prop_assert_eq!(vbs(&t).mean_relert, 1.0);
        for p in 0..t.n_problems() {
            let col = t.relert_column(p);
            prop_assert!(col.iter().any(|&v| v == 1.0));
            prop_assert!(col.iter().all(|&v| v >= 1.0 && v <= t.penalty));
        }
    }

    #[test]
    fn competition_ranks_count_strictly_better(v in proptest::collection::vec(prop_oneof![Just(f64::INFINITY), 1.0f64..10.0, Just(5.0)], 1..12)) {
        let r = competition_ranks(&v);
        for (i, ri) in r.iter().enumerate() {
            match ri {
                None => prop_assert!(!v[i].is_finite()),
                Some(k) => prop_assert_eq!(*k, 1 + v.iter().filter(|w| w.is_finite() && **w < v[i]).count()),
            }
        }
    }

    #[test]
    fn portfolio_is_the_intersection((ns, np, flat) in ert_matrix(), k in 1usize..4) {
        let t = table(ns, np, &flat);
        prop_assume!(t.n_problems() > 0);
        if let Ok(p) = build_portfolio(&t, k) {
            let mut sets = p.per_dim_sets.values();
            let mut common: BTreeSet<String> = sets.next().unwrap().clone();
            for s in sets {
                common = common.intersection(s).cloned().collect();
            }
            prop_assert_eq!(p.members.iter().cloned().collect::<BTreeSet<_>>(), common);
            let means: Vec<f64> = p.members.iter().map(|m| t.mean_relert(t.solver_index(m).unwrap())).collect();
            prop_assert!(means.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn labels_survive_monotone_transforms((ns, np, flat) in ert_matrix(), seed in any::<u64>()) {
        let t = table(ns, np, &flat);
        prop_assume!(t.n_problems() > 0);
        let squared: Vec<f64> = flat.iter().map(|v| v * v).collect();
        let t2 = table(ns, np, &squared);
        prop_assert_eq!(label_best(&t, seed), label_best(&t2, seed));
    }

    #[test]
    fn angles_lie_in_range(a in proptest::collection::vec(-5.0f64..5.0, 3), b in proptest::collection::vec(-5.0f64..5.0, 3), c in proptest::collection::vec(-5.0f64..5.0, 3)) {
        let v = angle_at(&c, &a, &b);
        prop_assert!(v.is_nan() || (0.0..=180.0).contains(&v));
    }

    #[test]
    fn tour_visits_every_point_once(n in 2usize..40, seed in any::<u64>()) {
        let design = improved_lhd(n, &BoxDomain::bbob(2), seed).unwrap();
        let mut order = tour(&design.points);
        order.sort_unstable();
        prop_assert_eq!(order, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn entropy_is_bounded(slopes in proptest::collection::vec(-10.0f64..10.0, 2..50), eps in 0.0f64..5.0) {
        let h = entropy(&slopes, eps);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&h));
    }

    #[test]
    fn derived_seeds_are_stable(seed in any::<u64>(), path in proptest::collection::vec(any::<u64>(), 0..4)) {
        prop_assert_eq!(rng::derive_seed(seed, &path), rng::derive_seed(seed, &path));
    }

    #[test]
    fn problem_keys_round_trip(fid in 1u32..25, dim in 1u32..41) {
        let k = ProblemKey::new(fid, dim);
        prop_assert_eq!(k.to_string().parse::<ProblemKey>().unwrap(), k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn lofo_predicts_every_problem_once(seed in any::<u64>()) {
        let mut r = rng::rng(seed);
        let np = 10;
        let problems: Vec<ProblemKey> = (1..=np as u32).map(|f| ProblemKey::new(f, 2)).collect();
        let x: Vec<Vec<f64>> = (0..np).map(|_| (0..3).map(|_| rand::Rng::random_range(&mut r, 0.0..1.0)).collect()).collect();
        let ert = (0..3).map(|_| (0..np).map(|_| rand::Rng::random_range(&mut r, 10.0..1e4)).collect()).collect();
        let t = PerformanceTable::from_ert(vec!["a".into(), "b".into(), "c".into()], problems.clone(), ert, 1e-2).unwrap();
        let data = Dataset::from_parts(vec!["x0".into(), "x1".into(), "x2".into()], x, t).unwrap();
        let knn = LearnerConfig::Knn(KnnParams { k: 3 });
        for paradigm in Paradigm::ALL {
            let cv = lofo_cv(&data, paradigm, &knn, &data.full_mask(), seed, CostModel::default()).unwrap();
            prop_assert_eq!(&cv.problems, &problems);
            prop_assert_eq!(cv.predicted.len(), np);
            prop_assert!(cv.relert_nocost.iter().all(|&v| v >= 1.0));
            prop_assert!(cv.relert_cost.iter().zip(&cv.relert_nocost).all(|(c, n)| c > n));
        }
    }
}
