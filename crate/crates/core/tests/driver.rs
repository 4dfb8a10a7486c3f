use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use retro_opt::driver::{
    measure_true_gradient, run_ra, sample_sets_for, DriverEvent, EvalConfig, RaConfig, WeightRule,
};
use retro_opt::inner_solver::{InnerConfig, SolverKind};
use retro_opt::oracle::{make_least_squares, make_logistic, Quadratic, StochasticOracle};
use retro_opt::sample_path::{eval_sample_path, WorkLedger};
use retro_opt::schedule::{SampleSizeSchedule, ToleranceSchedule};

fn geometric(m1: u64) -> SampleSizeSchedule {
    SampleSizeSchedule::Geometric { c1: 2.0, m1 }
}

#[test]
fn full_data_minimizer_has_zero_true_gradient() {
    let ls = make_least_squares(6, 800, 3);
    let x = DMatrix::from_row_slice(800, 6, ls.covariates());
    let y = DVector::from_column_slice(ls.responses());
    let beta = (x.transpose() * &x).cholesky().unwrap().solve(&(x.transpose() * y));
    let (_, g) = measure_true_gradient(&ls, beta.as_slice(), 1, 0).unwrap();
    assert!(g <= 1e-8, "{g}");
    assert_eq!(ls.work().samples(), 0);
}

#[test]
fn events_follow_adapted_order() {
    let lg = make_logistic(4, 1_000, 1);
    let cfg = RaConfig::new(geometric(16), ToleranceSchedule::default(), 5);
    let t = run_ra(&lg, &[0.0; 4], &cfg, &EvalConfig::default(), 2).unwrap();
    let expected: Vec<DriverEvent> = (1..=5)
        .flat_map(|k| {
            [
                DriverEvent::SampleDrawn { k },
                DriverEvent::ToleranceSet { k },
                DriverEvent::InnerSolveStarted { k },
                DriverEvent::InnerSolveFinished { k },
                DriverEvent::Averaged { k },
            ]
        })
        .collect();
    assert_eq!(t.events, expected);
}

#[test]
fn warm_start_is_previous_average() {
    let lg = make_logistic(3, 1_000, 4);
    let mut cfg = RaConfig::new(geometric(10), ToleranceSchedule::Deterministic { c2: 0.5 }, 6);
    cfg.weights = WeightRule::Uniform;
    let x0 = [0.1, -0.2, 0.3];
    let t = run_ra(&lg, &x0, &cfg, &EvalConfig::default(), 8).unwrap();
    assert_eq!(t.warm_starts[0], x0.to_vec());
    for k in 1..6 {
        let n = k as f64;
        let mean: Vec<f64> = (0..3).map(|j| t.iterates[..k].iter().map(|x| x[j]).sum::<f64>() / n).collect();
        for (a, b) in t.warm_starts[k].iter().zip(&mean) {
            assert!((a - b).abs() <= 1e-15 * (1.0 + b.abs()));
        }
    }
    assert_eq!(t.records.iter().map(|r| r.k).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6]);
}

#[test]
fn cold_start_and_no_memory_toggles() {
    let ls = make_least_squares(5, 2_000, 5);
    let mut cfg = RaConfig::new(geometric(20), ToleranceSchedule::default(), 4);
    cfg.warm_start = false;
    cfg.carry_memory = false;
    let x0 = vec![1.0; 5];
    let t = run_ra(&ls, &x0, &cfg, &EvalConfig::default(), 1).unwrap();
    assert!(t.warm_starts.iter().all(|w| *w == x0));
}

#[test]
fn same_seed_same_trace() {
    let lg = make_logistic(5, 3_000, 6);
    let mut cfg = RaConfig::new(SampleSizeSchedule::damped_default(), ToleranceSchedule::default(), 8);
    cfg.nested_samples = true;
    let a = run_ra(&lg, &[0.0; 5], &cfg, &EvalConfig::default(), 77).unwrap();
    let b = run_ra(&lg, &[0.0; 5], &cfg, &EvalConfig::default(), 77).unwrap();
    assert_eq!(a, b);
    let c = run_ra(&lg, &[0.0; 5], &cfg, &EvalConfig::default(), 78).unwrap();
    assert_ne!(a.records, c.records);
}

#[test]
fn replayed_sample_sets_reproduce_logged_norms() {
    let ls = make_least_squares(8, 4_000, 2);
    let cfg = RaConfig::new(geometric(32), ToleranceSchedule::default(), 6);
    let t = run_ra(&ls, &[0.0; 8], &cfg, &EvalConfig::default(), 4).unwrap();
    let sets = sample_sets_for(&ls, &cfg.schedule, false, 4, 6).unwrap();
    let mut scratch = WorkLedger::default();
    for ((rec, set), x) in t.records.iter().zip(&sets).zip(&t.iterates) {
        let e = eval_sample_path(&ls, set, x, &mut scratch).unwrap();
        assert_eq!(e.grad_norm, rec.grad_norm_sample_path);
    }
}

#[test]
fn iteration_cap_is_not_fatal() {
    let q = Quadratic::new(vec![1.0, 0.0, 0.0, 100.0], vec![1.0, 1.0], 0.5, 2).unwrap();
    let mut cfg = RaConfig::new(geometric(8), ToleranceSchedule::Deterministic { c2: 1e-9 }, 3);
    cfg.solver = InnerConfig { kind: SolverKind::GradientDescent, inner_cap: Some(2), ..InnerConfig::default() };
    let t = run_ra(&q, &[3.0, 3.0], &cfg, &EvalConfig { m_eval: 100, ..Default::default() }, 0).unwrap();
    assert_eq!(t.records.len(), 3);
    assert!(t.records.iter().all(|r| r.inner_iterations == 2));
}

#[test]
fn median_true_gradient_settles_down() {
    let ls = make_least_squares(50, 20_000, 1);
    let cfg = RaConfig::new(geometric(50), ToleranceSchedule::Deterministic { c2: 200.0 }, 9);
    let runs: Vec<Vec<f64>> = (0..11u64)
        .into_par_iter()
        .map(|s| {
            let t = run_ra(&ls, &[0.0; 50], &cfg, &EvalConfig::default(), 200 + s).unwrap();
            t.records.iter().map(|r| r.grad_norm_true.unwrap()).collect()
        })
        .collect();
    let med: Vec<f64> = (0..9)
        .map(|k| {
            let mut v: Vec<f64> = runs.iter().map(|r| r[k]).collect();
            v.sort_by(f64::total_cmp);
            v[5]
        })
        .collect();
    for k in 2..8 {
        assert!(med[k + 1] <= med[k], "median rose at k = {}: {med:?}", k + 2);
    }
}
