use std::sync::Arc;

use crate::approx_index::IndexStats;
use crate::error::Result;
use crate::matroid::{greedy_in_order, weight_order, MatroidSpec, TieBreak};

use super::arms::RewardRange;
use super::estimates::{lambda, Estimates, MeanUpdate};

/// Counters an agent exposes after a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub op_count: u64,
    pub epsilon: Option<f64>,
    pub index_stats: Option<IndexStats>,
    pub hitting_set_size: Option<usize>,
    pub heap_rebuilds: Option<u64>,
    pub heap_checks: Vec<HeapCheck>,
    /// Rounds where the selected base was compared against brute force, and
    /// how many of them missed the `1/(1+epsilon)` guarantee.
    pub guarantee_checks: u64,
    pub guarantee_violations: u64,
}

/// One sampled comparison of the lazy heap against the exact top-D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeapCheck {
    pub t: u64,
    pub t_now: u64,
    /// Heap keys (computed with `t_now`) of the selected arms.
    pub heap_key_total: f64,
    /// Current-round UCB indices of the selected arms.
    pub selected_total: f64,
    /// Best possible total of current-round UCB indices.
    pub exact_total: f64,
}

impl HeapCheck {
    /// `sqrt(ln t_now / ln t)`.
    pub fn factor(&self) -> f64 {
        ((self.t_now as f64).ln() / (self.t as f64).ln()).sqrt()
    }
}

/// A semi-bandit learner. Rounds are numbered from 1.
pub trait Agent: Send {
    fn name(&self) -> &'static str;

    /// Members (ascending) of the base to pull in round `t`.
    fn select(&mut self, t: u64) -> Result<Vec<usize>>;

    /// Feedback for the base returned by the last `select`.
    fn observe(&mut self, t: u64, members: &[usize], rewards: &[f64]) -> Result<()>;

    fn estimates(&self) -> &Estimates;

    /// Rounds spent before index-based play starts.
    fn init_rounds(&self) -> u64;

    fn diagnostics(&self) -> Diagnostics;
}

/// Shared state of the agents that run an explicit initialization plan.
#[derive(Debug, Clone)]
pub(crate) struct Core {
    pub spec: Arc<MatroidSpec>,
    pub range: RewardRange,
    pub estimates: Estimates,
    pub plan: Vec<Vec<usize>>,
}

impl Core {
    pub fn new(spec: Arc<MatroidSpec>, range: RewardRange, plan: Vec<Vec<usize>>, update: MeanUpdate) -> Self {
        let k = spec.ground_size();
        Self {
            spec,
            range,
            estimates: Estimates::new(k, update),
            plan,
        }
    }

    pub fn planned(&self, t: u64) -> Option<Vec<usize>> {
        self.plan.get(t as usize - 1).cloned()
    }

    pub fn ucb_indices(&self, t: u64) -> Vec<f64> {
        let lam = lambda(&self.range, t);
        let e = &self.estimates;
        e.mu_hat()
            .iter()
            .zip(e.pulls())
            .map(|(&mu, &n)| mu + lam / (n as f64).sqrt())
            .collect()
    }

    pub fn record(&mut self, t: u64, members: &[usize], rewards: &[f64]) {
        for (&k, &y) in members.iter().zip(rewards) {
            self.estimates.record(t, k, y);
        }
    }
}

/// Combinatorial UCB: greedy on all `K` UCB indices every round.
#[derive(Debug, Clone)]
pub struct Cucb {
    core: Core,
    ops: u64,
}

impl Cucb {
    pub fn new(spec: Arc<MatroidSpec>, range: RewardRange, plan: Vec<Vec<usize>>, update: MeanUpdate) -> Self {
        Self {
            core: Core::new(spec, range, plan, update),
            ops: 0,
        }
    }
}

impl Agent for Cucb {
    fn name(&self) -> &'static str {
        "cucb"
    }

    fn select(&mut self, t: u64) -> Result<Vec<usize>> {
        if let Some(b) = self.core.planned(t) {
            return Ok(b);
        }
        let idx = self.core.ucb_indices(t);
        let order = weight_order(&idx, TieBreak::AscendingIndex);
        let mut scanned = 0u64;
        let base = greedy_in_order(&self.core.spec, order.into_iter().inspect(|_| scanned += 1))?;
        self.ops += idx.len() as u64 + scanned;
        Ok(base.into_members())
    }

    fn observe(&mut self, t: u64, members: &[usize], rewards: &[f64]) -> Result<()> {
        self.core.record(t, members, rewards);
        Ok(())
    }

    fn estimates(&self) -> &Estimates {
        &self.core.estimates
    }

    fn init_rounds(&self) -> u64 {
        self.core.plan.len() as u64
    }

    fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            op_count: self.ops,
            ..Default::default()
        }
    }
}
