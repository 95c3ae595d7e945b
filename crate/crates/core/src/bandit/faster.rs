use std::sync::Arc;

use crate::approx_index::{
    ApproxIndex, Bounds, Coverage, Feature, HittingSet, IndexOptions, InstancePolicy, Query,
};
use crate::error::{input_err, Error, Result};
use crate::matroid::{enumerate_bases, MatroidSpec, ENUMERATION_LIMIT};

use super::agent::{Agent, Core, Diagnostics};
use super::arms::RewardRange;
use super::estimates::{lambda, Estimates, MeanUpdate};

/// Which query directions the index must answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QueryRange {
    /// Only the directions `(1, lambda_t)` the run can actually issue.
    #[default]
    Horizon,
    /// Every direction; practical only for coarse grids.
    FullCircle,
}

#[derive(Debug, Clone)]
pub struct FasterOptions {
    pub horizon: u64,
    pub m: u32,
    pub epsilon: Option<f64>,
    pub policy: InstancePolicy,
    pub query_range: QueryRange,
    pub cross_check: bool,
    /// Compare every selected base against brute force (small `K` only).
    pub check_guarantee: bool,
    pub hitting_set: Option<Arc<HittingSet>>,
}

impl FasterOptions {
    pub fn new(horizon: u64, m: u32) -> Self {
        Self {
            horizon,
            m,
            epsilon: None,
            policy: InstancePolicy::Auto,
            query_range: QueryRange::Horizon,
            cross_check: false,
            check_guarantee: false,
            hitting_set: None,
        }
    }
}

/// `1 / ln^m T`.
pub fn default_epsilon(horizon: u64, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(input_err!("m must be at least 1"));
    }
    let eps = (horizon as f64).ln().powi(-(m as i32));
    if !(eps > 0.0 && eps < 1.0) {
        return Err(input_err!("1/ln^m T = {eps} is not in (0, 1); T = {horizon} is too small"));
    }
    Ok(eps)
}

/// UCB with the approximate dynamic index: per round one lookup plus one
/// feature update per pulled arm.
pub struct FasterCucb {
    core: Core,
    options: FasterOptions,
    epsilon: f64,
    bounds: Bounds,
    index: Option<ApproxIndex>,
    checks: u64,
    violations: u64,
}

impl FasterCucb {
    pub fn new(
        spec: Arc<MatroidSpec>,
        range: RewardRange,
        plan: Vec<Vec<usize>>,
        update: MeanUpdate,
        options: FasterOptions,
    ) -> Result<Self> {
        let horizon = options.horizon;
        if plan.len() as u64 >= horizon {
            return Err(Error::Refused(format!(
                "horizon {horizon} ends before initialization ({} rounds) completes",
                plan.len()
            )));
        }
        let epsilon = match options.epsilon {
            Some(e) => e,
            None => default_epsilon(horizon, options.m)?,
        };
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(input_err!("epsilon must lie in (0, 1), got {epsilon}"));
        }
        let bounds = Bounds::new(range.a, range.b, 1.0 / (horizon as f64).sqrt(), 1.0)?;
        Ok(Self {
            core: Core::new(spec, range, plan, update),
            options,
            epsilon,
            bounds,
            index: None,
            checks: 0,
            violations: 0,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn index(&self) -> Option<&ApproxIndex> {
        self.index.as_ref()
    }

    /// Coverage used once initialization ends after `init_rounds` rounds.
    pub fn coverage_for(range: &RewardRange, horizon: u64, init_rounds: u64, query_range: QueryRange) -> Result<Coverage> {
        match query_range {
            QueryRange::FullCircle => Ok(Coverage::Circle),
            QueryRange::Horizon => {
                let first = (init_rounds + 1).min(horizon);
                Coverage::cone(lambda(range, first).atan(), lambda(range, horizon).atan())
            }
        }
    }

    fn feature(&self, k: usize) -> Feature {
        let e = &self.core.estimates;
        let r = &self.core.range;
        Feature::new(e.mu_hat()[k].clamp(r.a, r.b), 1.0 / (e.pulls()[k] as f64).sqrt())
    }

    fn build_index(&mut self) -> Result<()> {
        let coverage = Self::coverage_for(
            &self.core.range,
            self.options.horizon,
            self.core.plan.len() as u64,
            self.options.query_range,
        )?;
        let features = (0..self.core.spec.ground_size()).map(|k| self.feature(k)).collect();
        let opts = IndexOptions {
            epsilon: self.epsilon,
            coverage,
            policy: self.options.policy,
            cross_check: self.options.cross_check,
            hitting_set: self.options.hitting_set.clone(),
        };
        self.index = Some(ApproxIndex::initialize(self.core.spec.clone(), self.bounds, features, opts)?);
        Ok(())
    }

    fn check_guarantee(&mut self, t: u64, members: &[usize]) -> Result<()> {
        let spec = &self.core.spec;
        if spec.ground_size() > ENUMERATION_LIMIT {
            return Err(Error::Refused("guarantee check needs K <= 20".into()));
        }
        let idx = self.core.ucb_indices(t);
        let got: f64 = members.iter().map(|&k| idx[k]).sum();
        let best = enumerate_bases(spec)?
            .iter()
            .map(|b| b.weight(&idx))
            .fold(f64::NEG_INFINITY, f64::max);
        self.checks += 1;
        if got < best / (1.0 + self.epsilon) - 1e-12 * best.abs() {
            self.violations += 1;
        }
        Ok(())
    }
}

impl Agent for FasterCucb {
    fn name(&self) -> &'static str {
        "fastercucb"
    }

    fn select(&mut self, t: u64) -> Result<Vec<usize>> {
        if let Some(b) = self.core.planned(t) {
            return Ok(b);
        }
        if self.index.is_none() {
            self.build_index()?;
        }
        let q = Query::new(1.0, lambda(&self.core.range, t));
        let members = self.index.as_mut().expect("built above").find_base_members(q)?;
        if self.options.check_guarantee {
            self.check_guarantee(t, &members)?;
        }
        Ok(members)
    }

    fn observe(&mut self, t: u64, members: &[usize], rewards: &[f64]) -> Result<()> {
        self.core.record(t, members, rewards);
        let feats: Vec<_> = members.iter().map(|&k| self.feature(k)).collect();
        if let Some(index) = &mut self.index {
            for (&k, f) in members.iter().zip(feats) {
                index.update_feature(k, f)?;
            }
        }
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
            op_count: self.index.as_ref().map_or(0, |i| i.stats().instance_updates),
            epsilon: Some(self.epsilon),
            index_stats: self.index.as_ref().map(|i| i.stats()),
            hitting_set_size: self.index.as_ref().map(|i| i.hitting_set().len()),
            guarantee_checks: self.checks,
            guarantee_violations: self.violations,
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_formula() {
        let t = (10.0f64).exp().round() as u64;
        assert!((default_epsilon(t, 1).unwrap() - 0.1).abs() < 1e-5);
        assert!(default_epsilon(2, 1).is_err());
        assert!(default_epsilon(100, 0).is_err());
    }
}
