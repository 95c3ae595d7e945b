use crate::error::{Error, Result};

use super::arms::RewardRange;

/// How the empirical mean is refreshed after a pull.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanUpdate {
    /// `mu += (y - mu) / N_k`: the sample mean of the arm's observations.
    #[default]
    Running,
    /// `mu = ((t-1)/t) mu + y/t` with `t` the round index.
    RoundIndexed,
}

/// Confidence radius scale `sqrt(1.5 (b-a)^2 ln t)`.
pub fn lambda(range: &RewardRange, t: u64) -> f64 {
    (1.5 * range.width().powi(2) * (t as f64).ln()).sqrt()
}

pub fn ucb_index(mu_hat: f64, n: u64, lambda_t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Contract("UCB index of an arm that was never pulled".into()));
    }
    Ok(mu_hat + lambda_t / (n as f64).sqrt())
}

/// Per-arm empirical means and pull counts.
#[derive(Debug, Clone)]
pub struct Estimates {
    mu_hat: Vec<f64>,
    pulls: Vec<u64>,
    update: MeanUpdate,
}

impl Estimates {
    pub fn new(k: usize, update: MeanUpdate) -> Self {
        Self {
            mu_hat: vec![0.0; k],
            pulls: vec![0; k],
            update,
        }
    }

    pub fn mu_hat(&self) -> &[f64] {
        &self.mu_hat
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn record(&mut self, t: u64, k: usize, y: f64) {
        self.pulls[k] += 1;
        let n = self.pulls[k];
        self.mu_hat[k] = match self.update {
            MeanUpdate::Running => self.mu_hat[k] + (y - self.mu_hat[k]) / n as f64,
            MeanUpdate::RoundIndexed => {
                let t = t.max(1) as f64;
                ((t - 1.0) / t) * self.mu_hat[k] + y / t
            }
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_examples() {
        assert_eq!(ucb_index(0.5, 4, 2.0).unwrap(), 1.5);
        assert!(matches!(ucb_index(0.5, 0, 2.0), Err(Error::Contract(_))));
        let r = RewardRange::new(0.1, 1.0).unwrap();
        // sqrt(1.5 * 0.81 * ln 100)
        assert!((lambda(&r, 100) - 2.365_5).abs() < 1e-4);
        assert!((1..1000).all(|t| lambda(&r, t + 1) >= lambda(&r, t)));
    }

    #[test]
    fn running_mean_is_sample_mean() {
        let mut e = Estimates::new(1, MeanUpdate::Running);
        for (t, y) in [0.2, 0.4, 0.9].into_iter().enumerate() {
            e.record(t as u64 + 1, 0, y);
        }
        assert!((e.mu_hat()[0] - 0.5).abs() < 1e-15);
        assert_eq!(e.pulls(), &[3]);
    }

    #[test]
    fn round_indexed_mean_follows_round_count() {
        let mut e = Estimates::new(1, MeanUpdate::RoundIndexed);
        e.record(4, 0, 0.8);
        assert!((e.mu_hat()[0] - 0.2).abs() < 1e-15);
    }
}
