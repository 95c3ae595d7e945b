//! Top-D heap for uniform matroids whose confidence scale is refreshed only at
//! the rounds of a rebuild schedule.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{input_err, Error, Result};
use crate::matroid::{MatroidKind, MatroidSpec};

use super::agent::{Agent, Diagnostics, HeapCheck};
use super::arms::RewardRange;
use super::estimates::{lambda, Estimates, MeanUpdate};

/// Rounds at which the heap is rebuilt. Members are `f(m)` for `m = 1, 2, ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// `2^m`
    Pow2,
    /// `m^2`
    Squares,
    /// `floor(m^alpha)`, `alpha > 1`
    Power(f64),
}

impl Schedule {
    pub fn contains(&self, s: u64) -> bool {
        match *self {
            Schedule::Pow2 => s >= 2 && s.is_power_of_two(),
            Schedule::Squares => {
                let r = (s as f64).sqrt().round() as u64;
                s >= 1 && (r.saturating_sub(1)..=r + 1).any(|m| m * m == s)
            }
            Schedule::Power(alpha) => {
                if s == 0 {
                    return false;
                }
                let m = (s as f64).powf(1.0 / alpha).round() as u64;
                (m.saturating_sub(1).max(1)..=m + 1).any(|m| (m as f64).powf(alpha).floor() as u64 == s)
            }
        }
    }

    /// `|schedule ∩ [1, horizon]|`.
    pub fn count_up_to(&self, horizon: u64) -> u64 {
        match *self {
            Schedule::Pow2 => (1..64).take_while(|&m| 1u64 << m <= horizon).count() as u64,
            _ => (1..=horizon).filter(|&s| self.contains(s)).count() as u64,
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Pow2 => write!(f, "pow2"),
            Schedule::Squares => write!(f, "squares"),
            Schedule::Power(a) => write!(f, "power:{a}"),
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pow2" => Ok(Schedule::Pow2),
            "squares" => Ok(Schedule::Squares),
            other => {
                let alpha = other
                    .strip_prefix("power:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| input_err!("unknown schedule '{other}' (pow2, squares, power:ALPHA)"))?;
                if !(alpha.is_finite() && alpha > 1.0) {
                    return Err(input_err!("schedule exponent must exceed 1, got {alpha}"));
                }
                Ok(Schedule::Power(alpha))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    key: f64,
    arm: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // larger key first, then smaller arm
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key).then(other.arm.cmp(&self.arm))
    }
}

pub struct LazyHeap {
    spec: Arc<MatroidSpec>,
    range: RewardRange,
    estimates: Estimates,
    schedule: Schedule,
    heap: BinaryHeap<Entry>,
    t_now: u64,
    rebuilds: u64,
    ops: u64,
    audit_rounds: BTreeSet<u64>,
    checks: Vec<HeapCheck>,
}

fn log_steps(n: usize) -> u64 {
    (usize::BITS - n.leading_zeros()) as u64
}

impl LazyHeap {
    pub fn new(spec: Arc<MatroidSpec>, range: RewardRange, schedule: Schedule, update: MeanUpdate) -> Result<Self> {
        if spec.kind() != MatroidKind::Uniform {
            return Err(Error::Refused("the lazy heap agent requires a uniform matroid".into()));
        }
        let k = spec.ground_size();
        Ok(Self {
            spec,
            range,
            estimates: Estimates::new(k, update),
            schedule,
            heap: BinaryHeap::with_capacity(k),
            t_now: 1,
            rebuilds: 0,
            ops: 0,
            audit_rounds: BTreeSet::new(),
            checks: Vec::new(),
        })
    }

    /// Rounds at which the selection is compared against the exact top-D.
    pub fn audit_at(&mut self, rounds: impl IntoIterator<Item = u64>) {
        self.audit_rounds.extend(rounds);
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    fn key(&self, k: usize) -> f64 {
        let n = self.estimates.pulls()[k];
        if n == 0 {
            return f64::INFINITY;
        }
        self.estimates.mu_hat()[k] + lambda(&self.range, self.t_now) / (n as f64).sqrt()
    }

    fn rebuild(&mut self, t_now: u64) {
        self.t_now = t_now;
        let entries: Vec<Entry> = (0..self.spec.ground_size())
            .map(|k| Entry {
                key: self.key(k),
                arm: k as u32,
            })
            .collect();
        self.ops += entries.len() as u64;
        self.heap = BinaryHeap::from(entries);
    }

    fn audit(&mut self, t: u64, members: &[usize], heap_keys: &[f64]) {
        let lam = lambda(&self.range, t);
        let e = &self.estimates;
        let idx: Vec<f64> = (0..self.spec.ground_size())
            .map(|k| e.mu_hat()[k] + lam / (e.pulls()[k] as f64).sqrt())
            .collect();
        let mut sorted = idx.clone();
        sorted.sort_unstable_by(|a, b| b.total_cmp(a));
        self.checks.push(HeapCheck {
            t,
            t_now: self.t_now,
            heap_key_total: heap_keys.iter().sum(),
            selected_total: members.iter().map(|&k| idx[k]).sum(),
            exact_total: sorted[..self.spec.rank()].iter().sum(),
        });
    }
}

impl Agent for LazyHeap {
    fn name(&self) -> &'static str {
        "lazyheap"
    }

    fn select(&mut self, t: u64) -> Result<Vec<usize>> {
        if self.schedule.contains(t) {
            self.rebuild(t);
            self.rebuilds += 1;
        } else if t == 1 {
            self.rebuild(1);
        }
        let d = self.spec.rank();
        let mut picked = Vec::with_capacity(d);
        for _ in 0..d {
            self.ops += log_steps(self.heap.len());
            let e = self.heap.pop().ok_or_else(|| Error::Internal("heap ran empty".into()))?;
            picked.push(e);
        }
        let mut members: Vec<usize> = picked.iter().map(|e| e.arm as usize).collect();
        members.sort_unstable();
        let covered = self.estimates.pulls().iter().all(|&n| n > 0);
        if covered && t >= 2 && self.audit_rounds.contains(&t) {
            let keys: Vec<f64> = picked.iter().map(|e| e.key).collect();
            self.audit(t, &members, &keys);
        }
        Ok(members)
    }

    fn observe(&mut self, t: u64, members: &[usize], rewards: &[f64]) -> Result<()> {
        for (&k, &y) in members.iter().zip(rewards) {
            self.estimates.record(t, k, y);
        }
        for &k in members {
            self.ops += log_steps(self.heap.len() + 1);
            self.heap.push(Entry {
                key: self.key(k),
                arm: k as u32,
            });
        }
        Ok(())
    }

    fn estimates(&self) -> &Estimates {
        &self.estimates
    }

    fn init_rounds(&self) -> u64 {
        self.spec.ground_size().div_ceil(self.spec.rank()) as u64
    }

    fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            op_count: self.ops,
            heap_rebuilds: Some(self.rebuilds),
            heap_checks: self.checks.clone(),
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_membership_and_counts() {
        assert!(!Schedule::Pow2.contains(1));
        assert!(Schedule::Pow2.contains(2) && Schedule::Pow2.contains(1024) && !Schedule::Pow2.contains(6));
        assert_eq!(Schedule::Pow2.count_up_to(1 << 14), 14);
        assert_eq!(Schedule::Squares.count_up_to(10_000), 100);
        assert!(Schedule::Squares.contains(1) && Schedule::Squares.contains(49) && !Schedule::Squares.contains(50));
        let p: Schedule = "power:2".parse().unwrap();
        assert_eq!(p.count_up_to(10_000), 100);
        assert!("power:1".parse::<Schedule>().is_err());
        assert!("fib".parse::<Schedule>().is_err());
        assert_eq!("squares".parse::<Schedule>().unwrap(), Schedule::Squares);
    }

    #[test]
    fn refuses_non_uniform() {
        let spec = Arc::new(MatroidSpec::partition(vec![0, 1]).unwrap());
        let range = RewardRange::new(0.1, 0.9).unwrap();
        assert!(matches!(
            LazyHeap::new(spec, range, Schedule::Pow2, MeanUpdate::Running),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn first_rounds_cover_all_arms() {
        let spec = Arc::new(MatroidSpec::uniform(5, 2).unwrap());
        let range = RewardRange::new(0.1, 0.9).unwrap();
        let mut agent = LazyHeap::new(spec, range, Schedule::Pow2, MeanUpdate::Running).unwrap();
        let mut seen = [false; 5];
        for t in 1..=agent.init_rounds() {
            let x = agent.select(t).unwrap();
            assert_eq!(x.len(), 2);
            x.iter().for_each(|&k| seen[k] = true);
            let y = vec![0.5; 2];
            agent.observe(t, &x, &y).unwrap();
        }
        assert!(seen.iter().all(|&s| s));
    }
}
