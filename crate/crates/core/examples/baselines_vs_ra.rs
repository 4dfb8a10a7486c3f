//! Fixed-step SGD and Adam against RA at equal oracle work on an
//! ill-conditioned least-squares instance.

use rayon::prelude::*;
use retro_opt::baselines::{run_adam, run_sgd, AdamConfig, BaselineConfig, SgdConfig};
use retro_opt::driver::{eval_seed_for, measure_true_gradient, run_ra, EvalConfig, RaConfig, RecordStatus, RunTrace};
use retro_opt::oracle::{LeastSquares, LeastSquaresConfig};
use retro_opt::schedule::{SampleSizeSchedule, ToleranceSchedule};

fn final_loss(t: &RunTrace) -> String {
    let r = t.records.last().unwrap();
    match (r.status, r.loss_true) {
        (RecordStatus::Diverged, _) | (_, None) => "diverged".into(),
        (_, Some(l)) => format!("{l:.4e}"),
    }
}

fn main() -> retro_opt::Result<()> {
    let problem = LeastSquares::generate(&LeastSquaresConfig::new(50, 20_000, 11).with_condition_target(1e4));
    println!("Gram condition number: {:.3e}", problem.gram_condition_number());
    let x0 = vec![0.0; 50];
    let eval = EvalConfig::default();
    let (f0, _) = measure_true_gradient(&problem, &x0, eval.m_eval, eval_seed_for(0))?;
    println!("f(x0) = {f0:.4e}");

    let cfg = RaConfig::new(SampleSizeSchedule::Geometric { c1: 2.0, m1: 50 }, ToleranceSchedule::default(), 10);
    let ra = run_ra(&problem, &x0, &cfg, &eval, 1)?;
    let budget = ra.records.last().unwrap().cumulative_oracle_work;
    println!("RA (no step size): f = {} after {budget} oracle calls", final_loss(&ra));

    let etas: Vec<f64> = (1..=8).map(|e| 10f64.powi(-e)).collect();
    let rows: Vec<String> = etas
        .par_iter()
        .map(|&eta| {
            let sgd = match BaselineConfig::Sgd(SgdConfig { step_size: eta, ..Default::default() }).with_work_budget(budget) {
                BaselineConfig::Sgd(c) => c,
                _ => unreachable!(),
            };
            let adam = match BaselineConfig::Adam(AdamConfig { step_size: eta, ..Default::default() }).with_work_budget(budget) {
                BaselineConfig::Adam(c) => c,
                _ => unreachable!(),
            };
            let s = run_sgd(&problem, &x0, &sgd, &eval, 1).unwrap();
            let a = run_adam(&problem, &x0, &adam, &eval, 1).unwrap();
            format!("step {eta:.0e}: SGD f = {:>10}, Adam f = {:>10}", final_loss(&s), final_loss(&a))
        })
        .collect();
    rows.iter().for_each(|r| println!("{r}"));
    Ok(())
}
