//! Retrospective approximation for smooth stochastic optimization.
//!
//! An outer loop solves a sequence of sample-average problems of growing size
//! to shrinking gradient tolerances with a warm-started deterministic L-BFGS
//! solver. The crate also ships SGD and Adam baselines and an experiment
//! harness that writes replicated, seeded traces.
//!
//! ```
//! use retro_opt::oracle::make_least_squares;
//! use retro_opt::driver::{run_ra, EvalConfig, RaConfig};
//! use retro_opt::schedule::{SampleSizeSchedule, ToleranceSchedule};
//!
//! let problem = make_least_squares(5, 2_000, 7);
//! let cfg = RaConfig::new(
//!     SampleSizeSchedule::Geometric { c1: 2.0, m1: 16 },
//!     ToleranceSchedule::default(),
//!     6,
//! );
//! let trace = run_ra(&problem, &[0.0; 5], &cfg, &EvalConfig::default(), 42).unwrap();
//! let first = trace.records[0].grad_norm_true.unwrap();
//! let last = trace.records[5].grad_norm_true.unwrap();
//! assert!(last < first);
//! ```

// Negated comparisons are used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod driver;
pub mod error;
pub mod gradcheck;
pub mod harness;
pub mod inner_solver;
pub mod linalg;
pub mod oracle;
pub mod sample_path;
pub mod schedule;

pub use error::{Error, Result};
