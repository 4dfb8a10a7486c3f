//! Sample-size and tolerance schedules.
//!
//! Sample sizes grow multiplicatively and are rounded up, with each factor
//! applied to the previous *rounded* size. Tolerances shrink like `M_k^{-1/2}`.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::oracle::StochasticOracle;
use crate::sample_path::{estimate_grad_norm_sigma, SampleSet, WorkLedger};

/// Largest sample size handed out; keeps every size exact in `f64`.
pub const MAX_SAMPLE_SIZE: u64 = 1 << 53;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SampleSizeSchedule {
    /// `M_1 = m1`, `M_k = ⌈c1·M_{k−1}⌉`.
    Geometric { c1: f64, m1: u64 },
    /// `M_1 = m1`, `M_k = ⌈(1 + a·k^{−b})·M_{k−1}⌉`.
    PolynomialFactor { a: f64, b: f64, m1: u64 },
    /// Explicit sizes for `k = 1, 2, …`.
    FixedList { list: Vec<u64> },
}

impl SampleSizeSchedule {
    /// The polynomially damped schedule `q_k = 1 + 7k^{−1.7}`, `M_1 = 2`.
    pub fn damped_default() -> Self {
        Self::PolynomialFactor { a: 7.0, b: 1.7, m1: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Geometric { c1, m1 } => {
                if !(*c1 > 1.0 && c1.is_finite()) {
                    return Err(contract(format!("geometric schedule needs c1 > 1, got {c1}")));
                }
                if *m1 == 0 {
                    return Err(contract("m1 must be positive"));
                }
            }
            Self::PolynomialFactor { a, b, m1 } => {
                if !(*a > 0.0 && a.is_finite() && *b > 0.0 && b.is_finite()) {
                    return Err(contract(format!("polynomial factor needs a > 0 and b > 0, got a = {a}, b = {b}")));
                }
                if *m1 == 0 {
                    return Err(contract("m1 must be positive"));
                }
            }
            Self::FixedList { list } => {
                if list.is_empty() || list.contains(&0) {
                    return Err(contract("fixed sample-size list must be non-empty with positive entries"));
                }
            }
        }
        Ok(())
    }

    /// Initial size `M_1`.
    pub fn m1(&self) -> u64 {
        match self {
            Self::Geometric { m1, .. } | Self::PolynomialFactor { m1, .. } => *m1,
            Self::FixedList { list } => list.first().copied().unwrap_or(1),
        }
    }

    /// Multiplicative growth factor used at iteration `k ≥ 2`.
    fn factor(&self, k: usize) -> f64 {
        match self {
            Self::Geometric { c1, .. } => *c1,
            Self::PolynomialFactor { a, b, .. } => 1.0 + a * (k as f64).powf(-b),
            Self::FixedList { .. } => unreachable!("fixed lists have no growth factor"),
        }
    }

    /// `M_k` given `M_{k−1}` (which must be supplied exactly when `k ≥ 2`).
    pub fn next_sample_size(&self, k: usize, m_prev: Option<u64>) -> Result<u64> {
        if k == 0 {
            return Err(contract("outer iterations are numbered from 1"));
        }
        if (k >= 2) != m_prev.is_some() {
            return Err(contract("the previous sample size is required exactly when k >= 2"));
        }
        if let Self::FixedList { list } = self {
            return list
                .get(k - 1)
                .copied()
                .ok_or_else(|| contract(format!("fixed sample-size list has no entry for k = {k}")));
        }
        let Some(prev) = m_prev else {
            return Ok(self.m1());
        };
        let next = (self.factor(k) * prev as f64).ceil();
        if !(next <= MAX_SAMPLE_SIZE as f64) {
            return Err(contract(format!("sample size at k = {k} exceeds {MAX_SAMPLE_SIZE}")));
        }
        Ok((next as u64).max(prev + 1))
    }

    /// `M_1, …, M_K`.
    pub fn sizes(&self, horizon: usize) -> Result<Vec<u64>> {
        let mut out: Vec<u64> = Vec::with_capacity(horizon);
        for k in 1..=horizon {
            let m = self.next_sample_size(k, out.last().copied())?;
            out.push(m);
        }
        Ok(out)
    }

    /// Sizes as floats, continuing past [`MAX_SAMPLE_SIZE`] without rounding
    /// concerns; only used for diagnostics.
    fn sizes_f64(&self, horizon: usize) -> Vec<f64> {
        match self {
            Self::FixedList { list } => list.iter().take(horizon).map(|&m| m as f64).collect(),
            _ => {
                let mut out = Vec::with_capacity(horizon);
                let mut m = self.m1() as f64;
                for k in 1..=horizon {
                    if k >= 2 {
                        m = (self.factor(k) * m).ceil().max(m + 1.0);
                    }
                    out.push(m);
                }
                out
            }
        }
    }
}

fn default_m_sigma() -> usize {
    100
}
fn default_recompute_every() -> usize {
    1
}
fn default_sigma_floor() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ToleranceSchedule {
    /// `ε_k = c2 / √M_k`.
    Deterministic { c2: f64 },
    /// `ε_k = max(σ̂_k, floor) / √M_k` with `σ̂_k` the spread of per-sample
    /// gradient norms at the warm start, refreshed every `recompute_every` iterations.
    Adaptive {
        #[serde(default = "default_m_sigma")]
        m_sigma: usize,
        #[serde(default = "default_recompute_every")]
        recompute_every: usize,
        #[serde(default = "default_sigma_floor")]
        sigma_floor: f64,
    },
    /// Deterministic schedule whose `c2` is `σ̂_1`, measured once at the
    /// initial point on the first sample set.
    Calibrated {
        #[serde(default = "default_m_sigma")]
        m_sigma: usize,
        #[serde(default = "default_sigma_floor")]
        sigma_floor: f64,
    },
}

impl Default for ToleranceSchedule {
    fn default() -> Self {
        Self::Adaptive { m_sigma: 100, recompute_every: 1, sigma_floor: 1e-10 }
    }
}

impl ToleranceSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Deterministic { c2 } if !(*c2 > 0.0 && c2.is_finite()) => {
                Err(contract(format!("deterministic tolerance needs c2 > 0, got {c2}")))
            }
            Self::Adaptive { m_sigma, recompute_every, sigma_floor } => {
                if *m_sigma < 2 || *recompute_every == 0 || !(*sigma_floor >= 0.0) {
                    return Err(contract("adaptive tolerance needs m_sigma >= 2, recompute_every >= 1, sigma_floor >= 0"));
                }
                Ok(())
            }
            Self::Calibrated { m_sigma, sigma_floor } => {
                if *m_sigma < 2 || !(*sigma_floor >= 0.0) {
                    return Err(contract("calibrated tolerance needs m_sigma >= 2 and sigma_floor >= 0"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `m_σ` for schedules that estimate `σ̂`.
    pub fn m_sigma(&self) -> Option<usize> {
        match self {
            Self::Deterministic { .. } => None,
            Self::Adaptive { m_sigma, .. } | Self::Calibrated { m_sigma, .. } => Some(*m_sigma),
        }
    }

    /// Copy with `m_σ` capped at `m_k`.
    pub fn capped_to(&self, m_k: u64) -> Self {
        let cap = |m: usize| m.min(usize::try_from(m_k).unwrap_or(usize::MAX));
        match self.clone() {
            Self::Adaptive { m_sigma, recompute_every, sigma_floor } => {
                Self::Adaptive { m_sigma: cap(m_sigma), recompute_every, sigma_floor }
            }
            Self::Calibrated { m_sigma, sigma_floor } => Self::Calibrated { m_sigma: cap(m_sigma), sigma_floor },
            other => other,
        }
    }
}

/// Cached `σ̂` shared across outer iterations of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SigmaCache {
    sigma: Option<f64>,
    computed_at: usize,
}

impl SigmaCache {
    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceDecision {
    pub eps: f64,
    /// The `σ̂` in force for this iteration, if any.
    pub sigma_hat: Option<f64>,
    /// Per-sample evaluations spent estimating `σ̂` at this iteration.
    pub sigma_evals: u64,
}

/// Everything `next_tolerance` may read: the warm start `X̄_{k−1}` and the
/// freshly drawn sample set, never the inner solution `X_k`.
pub struct ToleranceInputs<'a> {
    pub k: usize,
    pub m_k: u64,
    pub warm_start: &'a [f64],
    pub sample_set: &'a SampleSet,
    pub oracle: &'a dyn StochasticOracle,
    pub subset_seed: u64,
}

pub fn next_tolerance(
    sched: &ToleranceSchedule,
    cache: &mut SigmaCache,
    inputs: &ToleranceInputs<'_>,
    ledger: &mut WorkLedger,
) -> Result<ToleranceDecision> {
    if inputs.m_k == 0 {
        return Err(contract("M_k must be positive"));
    }
    let root_m = (inputs.m_k as f64).sqrt();
    let estimate = |m_sigma: usize, ledger: &mut WorkLedger| -> Result<f64> {
        if m_sigma as u64 > inputs.m_k {
            return Err(contract(format!("m_sigma = {m_sigma} exceeds M_k = {}", inputs.m_k)));
        }
        estimate_grad_norm_sigma(inputs.oracle, inputs.sample_set, inputs.warm_start, m_sigma, inputs.subset_seed, ledger)
    };
    match sched {
        ToleranceSchedule::Deterministic { c2 } => Ok(ToleranceDecision { eps: c2 / root_m, sigma_hat: None, sigma_evals: 0 }),
        ToleranceSchedule::Adaptive { m_sigma, recompute_every, sigma_floor } => {
            let stale = match cache.sigma {
                None => true,
                Some(_) => inputs.k >= cache.computed_at + recompute_every,
            };
            let mut sigma_evals = 0;
            if stale {
                let s = estimate(*m_sigma, ledger)?;
                cache.sigma = Some(s);
                cache.computed_at = inputs.k;
                sigma_evals = *m_sigma as u64;
            }
            let sigma = cache.sigma.expect("sigma cached above");
            Ok(ToleranceDecision { eps: sigma.max(*sigma_floor) / root_m, sigma_hat: Some(sigma), sigma_evals })
        }
        ToleranceSchedule::Calibrated { m_sigma, sigma_floor } => {
            let mut sigma_evals = 0;
            if cache.sigma.is_none() {
                cache.sigma = Some(estimate(*m_sigma, ledger)?);
                cache.computed_at = inputs.k;
                sigma_evals = *m_sigma as u64;
            }
            let sigma = cache.sigma.expect("sigma cached above");
            Ok(ToleranceDecision { eps: sigma.max(*sigma_floor) / root_m, sigma_hat: Some(sigma), sigma_evals })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummabilityVerdict {
    /// Proven from the schedule's closed form.
    Summable,
    /// The partial sums give no evidence of convergence.
    NotCertified,
    /// Only the numerical partial sum is reported.
    NumericalOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub horizon: usize,
    /// `Σ_{k ≤ horizon} M_k^{−1/2}`.
    pub partial_sum: f64,
    /// Closed-form bound on the infinite sum, when one is known.
    pub analytic_bound: Option<f64>,
    pub verdict: SummabilityVerdict,
    /// Least-squares slope of `log M_k` against `log k` over the second half
    /// of the horizon.
    pub growth_exponent: Option<f64>,
    pub tolerance_verdict: SummabilityVerdict,
}

pub fn check_summability(sched: &SampleSizeSchedule, tol: &ToleranceSchedule, horizon: usize) -> Result<SummabilityReport> {
    if horizon == 0 {
        return Err(contract("horizon must be positive"));
    }
    sched.validate()?;
    let sizes = sched.sizes_f64(horizon);
    let partial_sum: f64 = sizes.iter().map(|m| m.powf(-0.5)).sum();

    let (verdict, analytic_bound) = match sched {
        SampleSizeSchedule::Geometric { c1, m1 } => {
            // M_k ≥ m1·c1^{k−1}, so Σ M_k^{−1/2} ≤ m1^{−1/2} / (1 − c1^{−1/2}).
            let bound = (*m1 as f64).powf(-0.5) / (1.0 - c1.powf(-0.5));
            (SummabilityVerdict::Summable, Some(bound))
        }
        SampleSizeSchedule::PolynomialFactor { .. } => (SummabilityVerdict::NumericalOnly, None),
        SampleSizeSchedule::FixedList { .. } => (SummabilityVerdict::NotCertified, None),
    };

    let growth_exponent = (sizes.len() >= 4).then(|| {
        let half = &sizes[sizes.len() / 2..];
        let offset = sizes.len() / 2 + 1;
        let pts: Vec<(f64, f64)> = half
            .iter()
            .enumerate()
            .map(|(i, m)| (((i + offset) as f64).ln(), m.ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    });

    let tolerance_verdict = match tol {
        ToleranceSchedule::Deterministic { .. } | ToleranceSchedule::Calibrated { .. } => verdict,
        ToleranceSchedule::Adaptive { .. } => SummabilityVerdict::NotCertified,
    };

    Ok(SummabilityReport { horizon, partial_sum, analytic_bound, verdict, growth_exponent, tolerance_verdict })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDenominator {
    /// `Λ·m1`, as displayed in the rate statement.
    M1,
    /// `Λ·√m1`, as obtained at the end of the rate derivation.
    #[default]
    SqrtM1,
}

/// Inputs to the geometric-rate reference bound. The smoothness, variance,
/// and growth constants are user-supplied estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCheckConfig {
    pub c1: f64,
    pub c2: f64,
    pub m1: u64,
    pub l_estimate: Option<f64>,
    pub sigma_estimate: Option<f64>,
    pub lambda_estimate: Option<f64>,
    #[serde(default)]
    pub denominator: BoundDenominator,
}

/// `(1/√c1)^{k−1} · L(c2 + σ) / (Λ·m1)` (or `Λ·√m1`).
pub fn rate_bound(cfg: &RateCheckConfig, k: usize) -> Result<f64> {
    let missing = |name: &str| Error::UnavailableDiagnostic(format!("rate bound needs an estimate of {name}"));
    let l = cfg.l_estimate.ok_or_else(|| missing("L"))?;
    let sigma = cfg.sigma_estimate.ok_or_else(|| missing("sigma"))?;
    let lambda = cfg.lambda_estimate.ok_or_else(|| missing("Lambda"))?;
    if k == 0 || !(cfg.c1 > 1.0) || cfg.m1 == 0 {
        return Err(contract("rate bound needs k >= 1, c1 > 1, m1 >= 1"));
    }
    let m1 = cfg.m1 as f64;
    let denom = match cfg.denominator {
        BoundDenominator::M1 => lambda * m1,
        BoundDenominator::SqrtM1 => lambda * m1.sqrt(),
    };
    Ok(cfg.c1.powf(-0.5).powi(k as i32 - 1) * l * (cfg.c2 + sigma) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{LeastSquares, SampleId};

    #[test]
    fn damped_schedule_first_terms() {
        let s = SampleSizeSchedule::damped_default();
        assert_eq!(s.next_sample_size(1, None).unwrap(), 2);
        // ⌈(1 + 7·2^{−1.7})·2⌉ = ⌈6.309…⌉
        assert_eq!(s.next_sample_size(2, Some(2)).unwrap(), 7);
    }

    #[test]
    fn geometric_doubling() {
        let s = SampleSizeSchedule::Geometric { c1: 2.0, m1: 10 };
        assert_eq!(s.sizes(4).unwrap(), vec![10, 20, 40, 80]);
    }

    #[test]
    fn precondition_on_previous_size() {
        let s = SampleSizeSchedule::Geometric { c1: 2.0, m1: 10 };
        assert!(s.next_sample_size(1, Some(3)).is_err());
        assert!(s.next_sample_size(2, None).is_err());
        assert!(s.next_sample_size(0, None).is_err());
    }

    #[test]
    fn fixed_list_runs_out() {
        let s = SampleSizeSchedule::FixedList { list: vec![3, 5] };
        assert_eq!(s.sizes(2).unwrap(), vec![3, 5]);
        assert!(s.sizes(3).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let s = SampleSizeSchedule::Geometric { c1: 2.0, m1: 1 };
        assert!(s.sizes(60).is_err());
    }

    #[test]
    fn deterministic_tolerance() {
        let ls = LeastSquares::from_data(vec![1.0], vec![1.0], 1).unwrap();
        let set = SampleSet::new(vec![SampleId::new(0, 0)], 1).unwrap();
        let inputs = ToleranceInputs { k: 1, m_k: 16, warm_start: &[0.0], sample_set: &set, oracle: &ls, subset_seed: 0 };
        let d = next_tolerance(&ToleranceSchedule::Deterministic { c2: 4.0 }, &mut SigmaCache::default(), &inputs, &mut WorkLedger::default()).unwrap();
        assert_eq!(d.eps, 1.0);
        assert_eq!(d.sigma_evals, 0);
    }

    #[test]
    fn adaptive_tolerance_hits_floor() {
        let ls = LeastSquares::from_data(vec![1.0; 100], vec![1.0; 100], 1).unwrap();
        let ids = (0..100).map(|i| SampleId::new(0, i)).collect();
        let set = SampleSet::new(ids, 1).unwrap();
        let inputs = ToleranceInputs { k: 1, m_k: 100, warm_start: &[0.0], sample_set: &set, oracle: &ls, subset_seed: 3 };
        let sched = ToleranceSchedule::Adaptive { m_sigma: 100, recompute_every: 1, sigma_floor: 1e-8 };
        let d = next_tolerance(&sched, &mut SigmaCache::default(), &inputs, &mut WorkLedger::default()).unwrap();
        assert_eq!(d.eps, 1e-9);
        assert_eq!(d.sigma_hat, Some(0.0));
    }

    #[test]
    fn adaptive_tolerance_from_two_norms() {
        // Per-sample gradient norms 1 and 3: σ̂ = √2, ε = √2/√2.
        let ls = LeastSquares::from_data(vec![1.0, 1.0], vec![-0.5, -1.5], 1).unwrap();
        let set = SampleSet::new(vec![SampleId::new(0, 0), SampleId::new(0, 1)], 1).unwrap();
        let inputs = ToleranceInputs { k: 1, m_k: 2, warm_start: &[0.0], sample_set: &set, oracle: &ls, subset_seed: 3 };
        let sched = ToleranceSchedule::Adaptive { m_sigma: 2, recompute_every: 1, sigma_floor: 1e-10 };
        let mut ledger = WorkLedger::default();
        let d = next_tolerance(&sched, &mut SigmaCache::default(), &inputs, &mut ledger).unwrap();
        assert!((d.eps - 1.0).abs() < 1e-15);
        assert_eq!((d.sigma_evals, ledger.oracle_work), (2, 2));

        let too_many = ToleranceSchedule::Adaptive { m_sigma: 3, recompute_every: 1, sigma_floor: 1e-10 };
        assert!(next_tolerance(&too_many, &mut SigmaCache::default(), &inputs, &mut ledger).is_err());
    }

    #[test]
    fn adaptive_cache_respects_cadence() {
        let ls = LeastSquares::from_data(vec![1.0, 1.0], vec![-0.5, -1.5], 1).unwrap();
        let set = SampleSet::new(vec![SampleId::new(0, 0), SampleId::new(0, 1)], 1).unwrap();
        let sched = ToleranceSchedule::Adaptive { m_sigma: 2, recompute_every: 3, sigma_floor: 0.0 };
        let mut cache = SigmaCache::default();
        let mut ledger = WorkLedger::default();
        let mut evals = Vec::new();
        for k in 1..=7 {
            let inputs = ToleranceInputs { k, m_k: 2 * k as u64, warm_start: &[0.0], sample_set: &set, oracle: &ls, subset_seed: k as u64 };
            let d = next_tolerance(&sched, &mut cache, &inputs, &mut ledger).unwrap();
            assert!((d.eps * (2.0 * k as f64).sqrt() - 2f64.sqrt()).abs() < 1e-12);
            evals.push(d.sigma_evals);
        }
        assert_eq!(evals, vec![2, 0, 0, 2, 0, 0, 2]);
    }

    #[test]
    fn summability_of_geometric() {
        let r = check_summability(
            &SampleSizeSchedule::Geometric { c1: 2.0, m1: 1 },
            &ToleranceSchedule::Deterministic { c2: 1.0 },
            50,
        )
        .unwrap();
        let closed = 1.0 / (1.0 - 2f64.powf(-0.5));
        assert!((r.analytic_bound.unwrap() - closed).abs() < 1e-12);
        assert!(r.partial_sum < closed);
        assert_eq!(r.verdict, SummabilityVerdict::Summable);
        assert_eq!(r.tolerance_verdict, SummabilityVerdict::Summable);
    }

    #[test]
    fn summability_of_constant_list() {
        let r = check_summability(
            &SampleSizeSchedule::FixedList { list: vec![1; 100] },
            &ToleranceSchedule::Deterministic { c2: 1.0 },
            100,
        )
        .unwrap();
        assert_eq!(r.partial_sum, 100.0);
        assert_eq!(r.verdict, SummabilityVerdict::NotCertified);
        assert_eq!(r.tolerance_verdict, SummabilityVerdict::NotCertified);
    }

    #[test]
    fn damped_schedule_is_numerical_only() {
        let r = check_summability(&SampleSizeSchedule::damped_default(), &ToleranceSchedule::default(), 1000).unwrap();
        assert_eq!(r.verdict, SummabilityVerdict::NumericalOnly);
        assert!(r.analytic_bound.is_none());
        // Far slower than geometric: the factor tends to 1, and the ceiling
        // eventually adds exactly 1 per step.
        let g = r.growth_exponent.unwrap();
        assert!(g > 0.3 && g < 1.2, "growth exponent {g}");
    }

    #[test]
    fn rate_bound_examples() {
        let mut cfg = RateCheckConfig {
            c1: 2.0,
            c2: 1.0,
            m1: 1,
            l_estimate: Some(1.0),
            sigma_estimate: Some(1.0),
            lambda_estimate: Some(1.0),
            denominator: BoundDenominator::M1,
        };
        assert!((rate_bound(&cfg, 2).unwrap() - 2f64.sqrt()).abs() < 1e-15);

        cfg.m1 = 4;
        cfg.c1 = 4.0;
        let first = rate_bound(&cfg, 1).unwrap();
        assert_eq!(first, 1.0 * (1.0 + 1.0) / 4.0);
        assert_eq!(rate_bound(&cfg, 3).unwrap(), first / 4.0);

        cfg.denominator = BoundDenominator::SqrtM1;
        assert_eq!(rate_bound(&cfg, 1).unwrap(), 2.0 / 2.0);

        cfg.lambda_estimate = None;
        assert!(matches!(rate_bound(&cfg, 1), Err(Error::UnavailableDiagnostic(_))));
    }

    #[test]
    fn schedules_parse_from_tagged_tables() {
        let s: SampleSizeSchedule = toml::from_str("kind = \"polynomial_factor\"\na = 7.0\nb = 1.7\nm1 = 2").unwrap();
        assert_eq!(s, SampleSizeSchedule::damped_default());
        let t: ToleranceSchedule = toml::from_str("kind = \"adaptive\"").unwrap();
        assert_eq!(t, ToleranceSchedule::default());
        assert!(toml::from_str::<SampleSizeSchedule>("kind = \"geometric\"\nc1 = 2.0\nm1 = 2\nc3 = 1").is_err());
    }
}
