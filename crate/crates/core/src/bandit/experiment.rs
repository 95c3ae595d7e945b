use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use crate::approx_index::{HittingSet, IndexStats};
use crate::error::{input_err, Error, Result};
use crate::matroid::{MatroidKind, MatroidSpec};

use super::agent::{Agent, Cucb, Diagnostics, HeapCheck};
use super::arms::{ArmModel, Environment, RewardRange};
use super::estimates::MeanUpdate;
use super::faster::{FasterCucb, FasterOptions, QueryRange};
use super::init::{init_plan, InitMode};
use super::lazy_heap::{LazyHeap, Schedule};
use super::regret::{oracle_best_action, GapDecomposition};
use crate::approx_index::{ApproxIndex, InstancePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Cucb,
    FasterCucb,
    LazyHeap,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Cucb => "cucb",
            Algo::FasterCucb => "fastercucb",
            Algo::LazyHeap => "lazyheap",
        })
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cucb" => Ok(Algo::Cucb),
            "fastercucb" => Ok(Algo::FasterCucb),
            "lazyheap" => Ok(Algo::LazyHeap),
            other => Err(input_err!("unknown algorithm '{other}' (cucb, fastercucb, lazyheap)")),
        }
    }
}

/// Everything needed for one seeded run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: Arc<MatroidSpec>,
    pub algo: Algo,
    pub horizon: u64,
    pub m: u32,
    pub epsilon: Option<f64>,
    pub range: RewardRange,
    pub arms: Vec<ArmModel>,
    pub seed: u64,
    pub schedule: Schedule,
    pub init_mode: InitMode,
    pub mean_update: MeanUpdate,
    pub policy: InstancePolicy,
    pub query_range: QueryRange,
    pub cross_check: bool,
    pub check_guarantee: bool,
    pub hitting_set: Option<Arc<HittingSet>>,
    pub heap_audit_rounds: Vec<u64>,
}

impl RunConfig {
    pub fn new(spec: MatroidSpec, algo: Algo, horizon: u64, range: RewardRange, arms: Vec<ArmModel>, seed: u64) -> Self {
        Self {
            spec: Arc::new(spec),
            algo,
            horizon,
            m: 1,
            epsilon: None,
            range,
            arms,
            seed,
            schedule: Schedule::Pow2,
            init_mode: InitMode::Coverage,
            mean_update: MeanUpdate::Running,
            policy: InstancePolicy::Auto,
            query_range: QueryRange::Horizon,
            cross_check: false,
            check_guarantee: false,
            hitting_set: None,
            heap_audit_rounds: Vec::new(),
        }
    }

    /// Two-point arms with the given means.
    pub fn two_point(spec: MatroidSpec, algo: Algo, horizon: u64, range: RewardRange, means: &[f64], seed: u64) -> Result<Self> {
        let arms = means.iter().map(|&mu| ArmModel::two_point(mu, range)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(spec, algo, horizon, range, arms, seed))
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.spec.ground_size();
        if self.arms.len() != k {
            return Err(input_err!("means: expected {k} arms, got {}", self.arms.len()));
        }
        if self.horizon == 0 {
            return Err(input_err!("T must be positive"));
        }
        if self.m == 0 {
            return Err(input_err!("m must be at least 1"));
        }
        if self.algo == Algo::LazyHeap && self.spec.kind() != MatroidKind::Uniform {
            return Err(Error::Refused("lazyheap requires a uniform matroid".into()));
        }
        Ok(())
    }

    fn faster_options(&self) -> FasterOptions {
        FasterOptions {
            horizon: self.horizon,
            m: self.m,
            epsilon: self.epsilon,
            policy: self.policy,
            query_range: self.query_range,
            cross_check: self.cross_check,
            check_guarantee: self.check_guarantee,
            hitting_set: self.hitting_set.clone(),
        }
    }

    /// Builds the FasterCUCB hitting set once so that runs differing only in
    /// seed can share it. Returns `None` for other algorithms.
    pub fn shared_hitting_set(&self) -> Result<Option<Arc<HittingSet>>> {
        if self.algo != Algo::FasterCucb {
            return Ok(None);
        }
        if let Some(hs) = &self.hitting_set {
            return Ok(Some(hs.clone()));
        }
        let plan_len = init_plan(&self.spec, self.init_mode)?.len() as u64;
        let opts = self.faster_options();
        let eps = match opts.epsilon {
            Some(e) => e,
            None => super::faster::default_epsilon(self.horizon, self.m)?,
        };
        let coverage = FasterCucb::coverage_for(&self.range, self.horizon, plan_len, self.query_range)?;
        let bounds = crate::approx_index::Bounds::new(self.range.a, self.range.b, 1.0 / (self.horizon as f64).sqrt(), 1.0)?;
        Ok(Some(Arc::new(ApproxIndex::build_hitting_set(bounds, eps, coverage)?)))
    }

    pub fn build_agent(&self) -> Result<Box<dyn Agent>> {
        self.validate()?;
        Ok(match self.algo {
            Algo::Cucb => {
                let plan = init_plan(&self.spec, self.init_mode)?;
                Box::new(Cucb::new(self.spec.clone(), self.range, plan, self.mean_update))
            }
            Algo::FasterCucb => {
                let plan = init_plan(&self.spec, self.init_mode)?;
                Box::new(FasterCucb::new(self.spec.clone(), self.range, plan, self.mean_update, self.faster_options())?)
            }
            Algo::LazyHeap => {
                let mut agent = LazyHeap::new(self.spec.clone(), self.range, self.schedule, self.mean_update)?;
                agent.audit_at(self.heap_audit_rounds.iter().copied());
                Box::new(agent)
            }
        })
    }
}

/// Per-round timing statistics in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSummary {
    pub rounds: usize,
    pub mean_ns: f64,
    pub p50_ns: u64,
    pub p99_ns: u64,
}

/// Result of one run.
#[derive(Debug, Clone)]
pub struct RegretTrace {
    pub algo: Algo,
    pub horizon: u64,
    pub means: Vec<f64>,
    pub cumulative_regret: Vec<f64>,
    /// Agent decide + update time per round; sampling is excluded.
    pub round_nanos: Vec<u64>,
    /// Pulls of arms outside the optimal base, cumulative per round.
    pub suboptimal_pulls: Vec<u64>,
    pub pulls_final: Vec<u64>,
    pub init_rounds: u64,
    pub gaps: GapDecomposition,
    pub t0: f64,
    pub theorem_bound: f64,
    /// Every observed `mu_hat` stayed in `[a, b]` and every `1/sqrt(N)` in `[1/sqrt(T), 1]`.
    pub bounds_respected: bool,
    pub diagnostics: Diagnostics,
}

/// Rounds after initialization excluded from timing statistics.
pub const TIMING_WARMUP: u64 = 100;

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.cumulative_regret.last().copied().unwrap_or(0.0)
    }

    pub fn regret_over_log_t(&self) -> f64 {
        self.final_regret() / (self.horizon as f64).ln()
    }

    pub fn index_stats(&self) -> Option<IndexStats> {
        self.diagnostics.index_stats
    }

    pub fn heap_checks(&self) -> &[HeapCheck] {
        &self.diagnostics.heap_checks
    }

    /// Statistics over rounds after initialization and warm-up.
    pub fn timing(&self) -> TimingSummary {
        let skip = (self.init_rounds + TIMING_WARMUP) as usize;
        let mut v: Vec<u64> = self.round_nanos.iter().skip(skip).copied().collect();
        if v.is_empty() {
            return TimingSummary {
                rounds: 0,
                mean_ns: 0.0,
                p50_ns: 0,
                p99_ns: 0,
            };
        }
        let mean_ns = v.iter().map(|&x| x as f64).sum::<f64>() / v.len() as f64;
        v.sort_unstable();
        let pct = |p: f64| v[((v.len() - 1) as f64 * p).round() as usize];
        TimingSummary {
            rounds: v.len(),
            mean_ns,
            p50_ns: pct(0.5),
            p99_ns: pct(0.99),
        }
    }
}

pub fn run_experiment(config: &RunConfig) -> Result<RegretTrace> {
    config.validate()?;
    let spec = &config.spec;
    let mut agent = config.build_agent()?;
    let mut env = Environment::new(config.arms.clone(), config.seed);
    let means = env.means();
    let best = oracle_best_action(&means, spec)?;
    let best_value = best.weight(&means);
    let gaps = GapDecomposition::new(&means, &best);
    let t0 = gaps.t0(spec.ground_size(), config.range.b, config.m);
    let theorem_bound = gaps.theorem_bound(&means, &config.range, config.horizon, config.m);

    let horizon = config.horizon as usize;
    let mut cumulative = Vec::with_capacity(horizon);
    let mut nanos = Vec::with_capacity(horizon);
    let mut subopt = Vec::with_capacity(horizon);
    let (mut regret, mut subopt_total) = (0.0f64, 0u64);
    let mut bounds_respected = true;
    let beta_floor = 1.0 / (config.horizon as f64).sqrt();
    let rank = spec.rank();

    for t in 1..=config.horizon {
        let start = Instant::now();
        let members = agent.select(t)?;
        let mut elapsed = start.elapsed();
        if members.len() != rank {
            return Err(Error::Internal(format!("round {t}: agent pulled {} arms, rank is {rank}", members.len())));
        }
        let rewards = env.pull(&members);
        let start = Instant::now();
        agent.observe(t, &members, &rewards)?;
        elapsed += start.elapsed();
        nanos.push(elapsed.as_nanos() as u64);

        let value: f64 = members.iter().map(|&k| means[k]).sum();
        let step = best_value - value;
        if step < -1e-12 * best_value.abs().max(1.0) {
            return Err(Error::Internal(format!("round {t}: pulled base beats the optimum by {}", -step)));
        }
        regret += step.max(0.0);
        cumulative.push(regret);
        subopt_total += members.iter().filter(|&&k| !best.contains(k)).count() as u64;
        subopt.push(subopt_total);

        let e = agent.estimates();
        for &k in &members {
            let mu = e.mu_hat()[k];
            let beta = 1.0 / (e.pulls()[k] as f64).sqrt();
            let tol = 1e-12;
            if mu < config.range.a - tol || mu > config.range.b + tol || beta < beta_floor - tol || beta > 1.0 {
                bounds_respected = false;
            }
        }
    }
    Ok(RegretTrace {
        algo: config.algo,
        horizon: config.horizon,
        means,
        cumulative_regret: cumulative,
        round_nanos: nanos,
        suboptimal_pulls: subopt,
        pulls_final: agent.estimates().pulls().to_vec(),
        init_rounds: agent.init_rounds(),
        gaps,
        t0,
        theorem_bound,
        bounds_respected,
        diagnostics: agent.diagnostics(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(algo: Algo, means: &[f64], d: usize, horizon: u64, seed: u64) -> RunConfig {
        let spec = MatroidSpec::uniform(means.len(), d).unwrap();
        RunConfig::two_point(spec, algo, horizon, RewardRange::new(0.1, 0.9).unwrap(), means, seed).unwrap()
    }

    #[test]
    fn zero_gap_has_zero_regret() {
        for algo in [Algo::Cucb, Algo::FasterCucb, Algo::LazyHeap] {
            let tr = run_experiment(&config(algo, &[0.5; 4], 2, 500, 1)).unwrap();
            assert_eq!(tr.final_regret(), 0.0, "{algo}");
        }
    }

    #[test]
    fn same_seed_same_trace() {
        for algo in [Algo::Cucb, Algo::FasterCucb, Algo::LazyHeap] {
            let c = config(algo, &[0.8, 0.6, 0.5, 0.3], 2, 2000, 5);
            let a = run_experiment(&c).unwrap();
            let b = run_experiment(&c).unwrap();
            assert_eq!(a.cumulative_regret, b.cumulative_regret);
            assert_eq!(a.pulls_final, b.pulls_final);
        }
    }

    #[test]
    fn regret_nondecreasing_and_bounds_hold() {
        let tr = run_experiment(&config(Algo::FasterCucb, &[0.8, 0.7, 0.5, 0.4, 0.2], 2, 3000, 2)).unwrap();
        assert!(tr.cumulative_regret.windows(2).all(|w| w[1] >= w[0]));
        assert!(tr.bounds_respected);
        assert_eq!(tr.pulls_final.iter().sum::<u64>(), 2 * 3000);
        assert!(tr.index_stats().unwrap().lookups > 0);
    }

    #[test]
    fn faster_meets_per_round_guarantee() {
        let mut c = config(Algo::FasterCucb, &[0.8, 0.7, 0.5, 0.45, 0.4, 0.2], 3, 1500, 8);
        c.check_guarantee = true;
        c.epsilon = Some(0.5);
        let tr = run_experiment(&c).unwrap();
        assert!(tr.diagnostics.guarantee_checks > 1000);
        assert_eq!(tr.diagnostics.guarantee_violations, 0);
    }

    #[test]
    fn two_arm_delta_min() {
        let tr = run_experiment(&config(Algo::Cucb, &[0.8, 0.2], 1, 10, 0)).unwrap();
        assert!((tr.gaps.delta_min.unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn horizon_shorter_than_initialization_is_refused() {
        let c = config(Algo::FasterCucb, &[0.5; 8], 1, 8, 0);
        assert!(matches!(run_experiment(&c), Err(Error::Refused(_))));
    }
}
