//! RA on logistic regression with uniform iterate averaging.

use retro_opt::driver::{run_ra, EvalConfig, RaConfig, WeightRule};
use retro_opt::oracle::make_logistic;
use retro_opt::schedule::{SampleSizeSchedule, ToleranceSchedule};

fn main() -> retro_opt::Result<()> {
    let problem = make_logistic(10, 50_000, 3);
    let mut cfg = RaConfig::new(SampleSizeSchedule::Geometric { c1: 1.5, m1: 64 }, ToleranceSchedule::default(), 14);

    for weights in [WeightRule::LastIterate, WeightRule::Uniform] {
        cfg.weights = weights.clone();
        let trace = run_ra(&problem, &[0.0; 10], &cfg, &EvalConfig::default(), 11)?;
        let last = trace.records.last().unwrap();
        println!(
            "{weights:?}: final |grad f(X_K)| = {:.3e}, f = {:.6}, oracle work = {}",
            last.grad_norm_true.unwrap(),
            last.loss_true.unwrap(),
            last.cumulative_oracle_work
        );
    }
    Ok(())
}
