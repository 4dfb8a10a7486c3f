//! A replicated experiment driven by a TOML config, as the CLI runs it.
//!
//! Writes `trace_r{r}.csv`, `aggregate.json`, and `resolved_config.json`
//! into a temporary directory and prints the median curve.

use retro_opt::harness::{run_experiment, self_check, ExperimentConfig, XAxis};

const CONFIG: &str = r#"
algorithm = "ra"
replications = 5
base_seed = 100

[problem]
kind = "least_squares"
dimension = 20
samples = 10000
seed = 3

[ra]
outer_iterations = 8

[schedule]
kind = "geometric"
c1 = 2.0
m1 = 40

[tolerance]
kind = "adaptive"
m_sigma = 40
"#;

fn main() -> retro_opt::Result<()> {
    let dir = std::env::temp_dir().join("retro-opt-harness-example");
    let mut cfg = ExperimentConfig::from_toml_str(CONFIG)?;
    cfg.output_dir = dir.clone();

    print!("{}", self_check(&cfg)?);

    let out = run_experiment(&cfg)?;
    println!("wrote {} traces to {}", out.traces.len(), dir.display());
    let series = out.aggregate.series.iter().find(|s| s.x_axis == XAxis::OracleWork).unwrap();
    for p in series.points.iter().filter(|p| p.replications == cfg.replications) {
        let g = p.grad_norm_true.unwrap();
        println!("work {:>8}: |grad f| median {:.3e} [{:.3e}, {:.3e}]", p.x, g.median, g.q25, g.q75);
    }
    Ok(())
}
