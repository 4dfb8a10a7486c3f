use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineConfig;
use crate::driver::{EvalConfig, RaConfig, WeightRule};
use crate::error::{contract, Error, Result};
use crate::gradcheck::NegatedGradient;
use crate::inner_solver::InnerConfig;
use crate::oracle::{
    load_csv_dataset, LeastSquares, LeastSquaresConfig, Logistic, LogisticConfig, Nonconvex, NonconvexConfig,
    StochasticOracle,
};
use crate::schedule::{SampleSizeSchedule, ToleranceSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmChoice {
    Ra,
    /// SGD or Adam, selected by `baseline.kind`.
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsvModel {
    LeastSquares,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    LeastSquares {
        dimension: usize,
        samples: usize,
        seed: u64,
        /// Rescale columns until the Gram matrix reaches this condition number.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        condition_target: Option<f64>,
    },
    Logistic {
        dimension: usize,
        samples: usize,
        seed: u64,
    },
    Nonconvex {
        dimension: usize,
        seed: u64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_frequency")]
        frequency: f64,
        #[serde(default = "default_noise")]
        noise_std: f64,
    },
    /// A header-row CSV file with a `y` column.
    Csv { path: PathBuf, model: CsvModel },
}

fn default_amplitude() -> f64 {
    1.0
}
fn default_frequency() -> f64 {
    3.0
}
fn default_noise() -> f64 {
    1.0
}

/// Deliberate oracle corruption, for exercising `check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFault {
    NegateGradient,
}

impl ProblemConfig {
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Self::LeastSquares { dimension, .. } | Self::Logistic { dimension, .. } | Self::Nonconvex { dimension, .. } => {
                Some(*dimension)
            }
            Self::Csv { .. } => None,
        }
    }

    pub fn build(&self) -> Result<Box<dyn StochasticOracle>> {
        Ok(match self {
            Self::LeastSquares { dimension, samples, seed, condition_target } => {
                let mut cfg = LeastSquaresConfig::new(*dimension, *samples, *seed);
                if let Some(t) = condition_target {
                    cfg = cfg.with_condition_target(*t);
                }
                Box::new(LeastSquares::generate(&cfg))
            }
            Self::Logistic { dimension, samples, seed } => {
                Box::new(Logistic::generate(&LogisticConfig { dimension: *dimension, samples: *samples, seed: *seed }))
            }
            Self::Nonconvex { dimension, seed, amplitude, frequency, noise_std } => {
                let mut cfg = NonconvexConfig::new(*dimension, *seed);
                cfg.amplitude = *amplitude;
                cfg.frequency = *frequency;
                cfg.noise_std = *noise_std;
                Box::new(Nonconvex::new(cfg))
            }
            Self::Csv { path, model } => {
                let data = load_csv_dataset(path)?;
                match model {
                    CsvModel::LeastSquares => Box::new(LeastSquares::from_dataset(data)?),
                    CsvModel::Logistic => Box::new(Logistic::from_dataset(data)?),
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RaSection {
    pub outer_iterations: usize,
    pub warm_start: bool,
    pub carry_memory: bool,
    pub nested_samples: bool,
}

impl Default for RaSection {
    fn default() -> Self {
        Self { outer_iterations: 10, warm_start: true, carry_memory: true, nested_samples: false }
    }
}

/// One experiment: a problem, an algorithm, and how many seeded replications to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmChoice,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Replication `r` runs with seed `base_seed + r`.
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Shared initial point; zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_fault: Option<TestFault>,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub ra: RaSection,
    #[serde(default = "default_schedule")]
    pub schedule: SampleSizeSchedule,
    #[serde(default)]
    pub tolerance: ToleranceSchedule,
    #[serde(default)]
    pub weights: WeightRule,
    #[serde(default)]
    pub solver: InnerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineConfig>,
    #[serde(default)]
    pub eval: EvalConfig,
}

fn default_replications() -> usize {
    3
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("retro-opt-out")
}
fn default_schedule() -> SampleSizeSchedule {
    SampleSizeSchedule::Geometric { c1: 2.0, m1: 50 }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config {
            key: e.span().map(|s| format!("bytes {}..{}", s.start, s.end)).unwrap_or_default(),
            message: e.message().trim().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = toml::from_str(&text).map_err(|e| {
            let location = e
                .span()
                .map(|s| {
                    let line = text[..s.start].matches('\n').count() + 1;
                    format!("{}:{line}", path.display())
                })
                .unwrap_or_else(|| path.display().to_string());
            Error::Config { key: location, message: e.message().trim().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config { key: String::new(), message: e.to_string() })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: &str| Err(Error::Config { key: key.into(), message: message.into() });
        if self.replications == 0 {
            return bad("replications", "must be at least 1");
        }
        if self.base_seed.checked_add(self.replications as u64).is_none() {
            return bad("base_seed", "base_seed + replications overflows");
        }
        if let (Some(x0), Some(d)) = (&self.x0, self.problem.dimension()) {
            if x0.len() != d {
                return bad("x0", &format!("has {} entries, problem dimension is {d}", x0.len()));
            }
        }
        match self.algorithm {
            AlgorithmChoice::Ra => self.ra_config().validate()?,
            AlgorithmChoice::Baseline if self.baseline.is_none() => {
                return bad("baseline", "algorithm = \"baseline\" needs a [baseline] section");
            }
            AlgorithmChoice::Baseline => {}
        }
        if self.eval.m_eval == 0 {
            return bad("eval.m_eval", "must be positive");
        }
        Ok(())
    }

    pub fn ra_config(&self) -> RaConfig {
        RaConfig {
            schedule: self.schedule.clone(),
            tolerance: self.tolerance.clone(),
            weights: self.weights.clone(),
            solver: self.solver,
            outer_iterations: self.ra.outer_iterations,
            warm_start: self.ra.warm_start,
            carry_memory: self.ra.carry_memory,
            nested_samples: self.ra.nested_samples,
        }
    }

    /// The configured oracle, with any test fault applied.
    pub fn build_oracle(&self) -> Result<Box<dyn StochasticOracle>> {
        let oracle = self.problem.build()?;
        Ok(match self.test_fault {
            None => oracle,
            Some(TestFault::NegateGradient) => Box::new(NegatedGradient::new(oracle)),
        })
    }

    pub fn initial_point(&self, dimension: usize) -> Result<Vec<f64>> {
        match &self.x0 {
            Some(x) if x.len() != dimension => Err(contract(format!("x0 has {} entries, expected {dimension}", x.len()))),
            Some(x) => Ok(x.clone()),
            None => Ok(vec![0.0; dimension]),
        }
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.replications as u64).map(|r| self.base_seed + r)
    }

    /// Hash of the resolved config, ignoring `output_dir`.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        crate::driver::fingerprint(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
algorithm = "ra"
replications = 2
base_seed = 10
output_dir = "out"

[problem]
kind = "least_squares"
dimension = 4
samples = 300
seed = 1
condition_target = 100.0

[ra]
outer_iterations = 5

[schedule]
kind = "polynomial_factor"
a = 7.0
b = 1.7
m1 = 2

[tolerance]
kind = "adaptive"
m_sigma = 20

[solver]
memory = 5

[solver.line_search]
c_armijo = 0.001

[eval]
m_eval = 500
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.replications, 2);
        assert_eq!(cfg.solver.line_search.c_armijo, 1e-3);
        assert_eq!(cfg.solver.line_search.max_backtracks, 50);
        assert_eq!(cfg.seeds().collect::<Vec<_>>(), vec![10, 11]);
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.fingerprint(), cfg.fingerprint());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for (from, to) in [
            ("memory = 5", "memroy = 5"),
            ("m_eval = 500", "m_eval = 500\nextra = 1"),
            ("seed = 1", "seed = 1\nnoise = 2.0"),
            ("outer_iterations = 5", "outer_iterations = 5\nwarm = true"),
        ] {
            let text = SAMPLE.replace(from, to);
            assert!(ExperimentConfig::from_toml_str(&text).is_err(), "accepted {to}");
        }
    }

    #[test]
    fn baseline_round_trip() {
        let text = r#"
algorithm = "baseline"
[problem]
kind = "nonconvex"
dimension = 3
seed = 2
[baseline]
kind = "adam"
step_size = 0.01
total_steps = 50
"#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        match cfg.baseline {
            Some(BaselineConfig::Adam(a)) => {
                assert_eq!(a.step_size, 0.01);
                assert_eq!(a.beta2, 0.999);
            }
            other => panic!("{other:?}"),
        }
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(again, cfg);
        assert!(ExperimentConfig::from_toml_str(&text.replace("total_steps = 50", "steps = 50")).is_err());
    }

    #[test]
    fn error_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, SAMPLE.replace("memory = 5", "memory = \"five\"")).unwrap();
        let msg = ExperimentConfig::from_path(&path).unwrap_err().to_string();
        let line = SAMPLE.lines().position(|l| l == "memory = 5").unwrap() + 1;
        assert!(msg.contains(&format!("bad.toml:{line}")), "{msg}");
    }
}
