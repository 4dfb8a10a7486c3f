//! Loading a finite dataset from CSV and fitting it with RA.

use std::io::Write;

use retro_opt::driver::{run_ra, EvalConfig, RaConfig};
use retro_opt::oracle::{load_csv_dataset, LeastSquares, StochasticOracle};
use retro_opt::schedule::{SampleSizeSchedule, ToleranceSchedule};

fn main() -> retro_opt::Result<()> {
    let path = std::env::temp_dir().join("retro-opt-example.csv");
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "x1,y,x2")?;
    for i in 0..2_000 {
        let (a, b) = ((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos());
        let noise = 0.01 * ((i * 7919 % 101) as f64 - 50.0) / 50.0;
        writeln!(f, "{a},{},{b}", 3.0 * a - 2.0 * b + noise)?;
    }
    drop(f);

    let data = load_csv_dataset(&path)?;
    println!("features {:?}, {} rows", data.feature_names, data.len());
    let problem = LeastSquares::from_dataset(data)?;
    let cfg = RaConfig::new(SampleSizeSchedule::Geometric { c1: 2.0, m1: 16 }, ToleranceSchedule::default(), 8);
    let trace = run_ra(&problem, &vec![0.0; problem.dimension()], &cfg, &EvalConfig::default(), 0)?;
    println!("fitted coefficients {:.4?} (generated with 3, -2)", trace.final_x);
    Ok(())
}
