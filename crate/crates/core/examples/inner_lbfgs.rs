//! The inner solver on one sample-path problem, then warm-started on a
//! larger one with its curvature memory carried over.

use retro_opt::inner_solver::{solve_to_tolerance, InnerConfig, SamplePathObjective, SolverState};
use retro_opt::oracle::make_logistic;
use retro_opt::sample_path::{draw_sample_set, SampleStream, WorkLedger};

fn main() -> retro_opt::Result<()> {
    let problem = make_logistic(8, 10_000, 5);
    let mut stream = SampleStream::new(1);
    let mut ledger = WorkLedger::default();
    let cfg = InnerConfig::default();
    let mut state = SolverState::new(vec![0.0; 8], cfg.memory);

    for (k, (m, eps)) in [(200, 1e-2), (800, 5e-3), (3200, 2.5e-3)].into_iter().enumerate() {
        let set = draw_sample_set(&problem, m, k + 1, &mut stream)?;
        let carried = state.memory.len();
        let r = solve_to_tolerance(&mut SamplePathObjective::new(&problem, &set, &mut ledger), &mut state, eps, &cfg)?;
        println!(
            "M = {m:>5}, eps = {eps:.1e}: {:?} after {} steps ({} pairs carried in), |grad f_M| = {:.3e}",
            r.status, r.inner_iterations, carried, r.grad_norm_out
        );
        let alphas: Vec<f64> = r.steps.iter().map(|s| s.alpha).collect();
        println!("  step sizes {alphas:?}");
    }
    println!("oracle work {} ({} gradient evaluations)", ledger.oracle_work, ledger.gradient_evals);
    Ok(())
}
