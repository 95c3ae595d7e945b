//! Reward distributions on `[a, b]` and the seeded environment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{input_err, Result};

/// Reward range shared by every arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardRange {
    pub a: f64,
    pub b: f64,
}

impl RewardRange {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && 0.0 < a && a < b) {
            return Err(input_err!("reward range must satisfy 0 < a < b, got a={a}, b={b}"));
        }
        Ok(Self { a, b })
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArmModel {
    /// `b` with probability `(mu - a)/(b - a)`, else `a`.
    TwoPoint { mu: f64, range: RewardRange },
    /// Normal(`loc`, `sigma`) resampled until it lands in `[a, b]`.
    TruncatedGaussian {
        loc: f64,
        sigma: f64,
        range: RewardRange,
        mean: f64,
    },
    /// Replays `values` cyclically.
    FixedTable { values: Vec<f64>, pos: usize },
}

fn truncated_normal_mean(loc: f64, sigma: f64, a: f64, b: f64) -> f64 {
    // Simpson's rule on the density restricted to [a, b]
    let n = 2000;
    let h = (b - a) / n as f64;
    let dens = |x: f64| (-0.5 * ((x - loc) / sigma).powi(2)).exp();
    let (mut mass, mut moment) = (0.0, 0.0);
    for i in 0..=n {
        let x = a + i as f64 * h;
        let c = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        mass += c * dens(x);
        moment += c * x * dens(x);
    }
    moment / mass
}

impl ArmModel {
    pub fn two_point(mu: f64, range: RewardRange) -> Result<Self> {
        if !range.contains(mu) {
            return Err(input_err!("mean {mu} outside [{}, {}]", range.a, range.b));
        }
        Ok(ArmModel::TwoPoint { mu, range })
    }

    pub fn truncated_gaussian(loc: f64, sigma: f64, range: RewardRange) -> Result<Self> {
        if !range.contains(loc) {
            return Err(input_err!("location {loc} outside [{}, {}]", range.a, range.b));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(input_err!("sigma must be positive, got {sigma}"));
        }
        Ok(ArmModel::TruncatedGaussian {
            loc,
            sigma,
            range,
            mean: truncated_normal_mean(loc, sigma, range.a, range.b),
        })
    }

    pub fn fixed_table(values: Vec<f64>, range: RewardRange) -> Result<Self> {
        if values.is_empty() {
            return Err(input_err!("reward table is empty"));
        }
        if let Some(v) = values.iter().find(|v| !range.contains(**v)) {
            return Err(input_err!("table value {v} outside [{}, {}]", range.a, range.b));
        }
        Ok(ArmModel::FixedTable { values, pos: 0 })
    }

    /// Expected reward.
    pub fn mean(&self) -> f64 {
        match self {
            ArmModel::TwoPoint { mu, .. } => *mu,
            ArmModel::TruncatedGaussian { mean, .. } => *mean,
            ArmModel::FixedTable { values, .. } => values.iter().sum::<f64>() / values.len() as f64,
        }
    }

    pub fn sample(&mut self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            ArmModel::TwoPoint { mu, range } => {
                let p = (*mu - range.a) / range.width();
                if rng.gen::<f64>() < p {
                    range.b
                } else {
                    range.a
                }
            }
            ArmModel::TruncatedGaussian { loc, sigma, range, .. } => {
                let normal = Normal::new(*loc, *sigma).expect("validated sigma");
                loop {
                    let x = normal.sample(rng);
                    if range.contains(x) {
                        return x;
                    }
                }
            }
            ArmModel::FixedTable { values, pos } => {
                let v = values[*pos];
                *pos = (*pos + 1) % values.len();
                v
            }
        }
    }
}

/// Arms plus one independent random stream per arm, so a draw depends only on
/// the seed, the arm and how often that arm was pulled before.
#[derive(Debug, Clone)]
pub struct Environment {
    arms: Vec<ArmModel>,
    streams: Vec<ChaCha8Rng>,
}

impl Environment {
    pub fn new(arms: Vec<ArmModel>, seed: u64) -> Self {
        let streams = (0..arms.len())
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                rng
            })
            .collect();
        Self { arms, streams }
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(ArmModel::mean).collect()
    }

    pub fn sample(&mut self, k: usize) -> f64 {
        self.arms[k].sample(&mut self.streams[k])
    }

    pub fn pull(&mut self, members: &[usize]) -> Vec<f64> {
        members.iter().map(|&k| self.sample(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range(a: f64, b: f64) -> RewardRange {
        RewardRange::new(a, b).unwrap()
    }

    #[test]
    fn two_point_at_upper_end_is_constant() {
        let mut env = Environment::new(vec![ArmModel::two_point(1.0, range(1e-9, 1.0)).unwrap()], 1);
        assert!((0..1000).all(|_| env.sample(0) == 1.0));
    }

    #[test]
    fn two_point_mean_concentrates() {
        let mut env = Environment::new(vec![ArmModel::two_point(0.5, range(0.1, 0.9)).unwrap()], 9);
        let n = 100_000;
        let mean = (0..n).map(|_| env.sample(0)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn fixed_table_replays() {
        let mut env = Environment::new(vec![ArmModel::fixed_table(vec![0.3, 0.7], range(0.1, 0.9)).unwrap()], 0);
        assert_eq!(env.pull(&[0, 0, 0]), vec![0.3, 0.7, 0.3]);
    }

    #[test]
    fn truncated_gaussian_stays_in_range() {
        let r = range(0.1, 0.9);
        let arm = ArmModel::truncated_gaussian(0.85, 0.3, r).unwrap();
        let mean = arm.mean();
        assert!(mean < 0.85 && mean > 0.1);
        let mut env = Environment::new(vec![arm], 4);
        let n = 200_000;
        let mut total = 0.0;
        for _ in 0..n {
            let x = env.sample(0);
            assert!(r.contains(x));
            total += x;
        }
        assert!((total / n as f64 - mean).abs() < 0.005);
    }

    #[test]
    fn streams_independent_of_interleaving() {
        let arms = vec![ArmModel::two_point(0.5, range(0.1, 0.9)).unwrap(); 2];
        let mut e1 = Environment::new(arms.clone(), 3);
        let mut e2 = Environment::new(arms, 3);
        let a: Vec<f64> = (0..50).map(|_| e1.sample(1)).collect();
        let b: Vec<f64> = (0..50)
            .map(|_| {
                e2.sample(0);
                e2.sample(1)
            })
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(RewardRange::new(0.0, 1.0).is_err());
        assert!(RewardRange::new(0.5, 0.5).is_err());
        assert!(ArmModel::two_point(0.95, range(0.1, 0.9)).is_err());
        assert!(ArmModel::fixed_table(vec![], range(0.1, 0.9)).is_err());
        assert!(ArmModel::truncated_gaussian(0.5, 0.0, range(0.1, 0.9)).is_err());
    }
}
