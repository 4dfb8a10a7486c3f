//! Retrospective approximation on a synthetic least-squares problem.
//!
//! `cargo run --release --example least_squares_ra`

use retro_opt::driver::{run_ra, EvalConfig, RaConfig};
use retro_opt::oracle::make_least_squares;
use retro_opt::schedule::{SampleSizeSchedule, ToleranceSchedule};

fn main() -> retro_opt::Result<()> {
    let problem = make_least_squares(50, 20_000, 1);
    let cfg = RaConfig::new(
        SampleSizeSchedule::Geometric { c1: 2.0, m1: 50 },
        ToleranceSchedule::Adaptive { m_sigma: 100, recompute_every: 1, sigma_floor: 1e-10 },
        12,
    );
    let trace = run_ra(&problem, &[0.0; 50], &cfg, &EvalConfig::default(), 7)?;

    println!("{:>3} {:>7} {:>10} {:>6} {:>12} {:>12} {:>10}", "k", "M_k", "eps_k", "inner", "|grad f|", "f", "work");
    for r in &trace.records {
        println!(
            "{:>3} {:>7} {:>10.3e} {:>6} {:>12.4e} {:>12.6} {:>10}",
            r.k,
            r.m_k,
            r.eps_k.unwrap_or(f64::NAN),
            r.inner_iterations,
            r.grad_norm_true.unwrap_or(f64::NAN),
            r.loss_true.unwrap_or(f64::NAN),
            r.cumulative_oracle_work
        );
    }
    let beta = problem.beta_true().expect("generated problem");
    let err: f64 = trace.final_x.iter().zip(beta).map(|(x, b)| (x - b).powi(2)).sum::<f64>().sqrt();
    println!("distance to the generating coefficients: {err:.4e}");
    Ok(())
}
