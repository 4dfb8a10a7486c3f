use serde::{Deserialize, Serialize};

use crate::driver::{Algorithm, OuterIterationRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XAxis {
    OracleWork,
    GradientEvals,
    OuterIteration,
}

impl XAxis {
    pub const ALL: [XAxis; 3] = [XAxis::OracleWork, XAxis::GradientEvals, XAxis::OuterIteration];

    fn of(&self, r: &OuterIterationRecord) -> u64 {
        match self {
            Self::OracleWork => r.cumulative_oracle_work,
            Self::GradientEvals => r.cumulative_gradient_evals,
            Self::OuterIteration => r.k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

/// Linear-interpolation quantile of sorted data (position `q·(n−1)`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantiles(values: &[f64]) -> Option<Quantiles> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(Quantiles { q25: quantile_sorted(&v, 0.25), median: quantile_sorted(&v, 0.5), q75: quantile_sorted(&v, 0.75) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatePoint {
    pub x: u64,
    /// Replications with a value at this point.
    pub replications: usize,
    pub loss: Option<Quantiles>,
    pub grad_norm_true: Option<Quantiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSeries {
    pub algorithm: Algorithm,
    pub x_axis: XAxis,
    pub points: Vec<AggregatePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateFile {
    pub replications: usize,
    pub seeds: Vec<u64>,
    pub series: Vec<AggregateSeries>,
    pub warnings: Vec<String>,
}

/// Quantiles across replications on the union of their x values.
///
/// Each replication contributes its last record at or before each grid
/// point; replications with no record yet are left out.
pub fn aggregate(algorithm: Algorithm, runs: &[&[OuterIterationRecord]], axis: XAxis) -> AggregateSeries {
    let mut grid: Vec<u64> = runs.iter().flat_map(|r| r.iter().map(|rec| axis.of(rec))).collect();
    grid.sort_unstable();
    grid.dedup();

    let mut cursors = vec![0usize; runs.len()];
    let points = grid
        .into_iter()
        .map(|x| {
            let mut loss = Vec::new();
            let mut grad = Vec::new();
            let mut present = 0;
            for (run, cur) in runs.iter().zip(cursors.iter_mut()) {
                while *cur < run.len() && axis.of(&run[*cur]) <= x {
                    *cur += 1;
                }
                if *cur == 0 {
                    continue;
                }
                let rec = &run[*cur - 1];
                present += 1;
                loss.extend(rec.loss_true);
                grad.extend(rec.grad_norm_true);
            }
            AggregatePoint { x, replications: present, loss: quantiles(&loss), grad_norm_true: quantiles(&grad) }
        })
        .collect();
    AggregateSeries { algorithm, x_axis: axis, points }
}
