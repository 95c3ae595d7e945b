//! Gap bookkeeping and the finite-horizon regret bound of FasterCUCB.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matroid::{enumerate_bases, greedy_max_weight_basis, Basis, MatroidSpec, ENUMERATION_LIMIT};

use super::arms::RewardRange;

/// Best base under the true means; cross-checked by enumeration when small.
pub fn oracle_best_action(mu: &[f64], spec: &MatroidSpec) -> Result<Basis> {
    let best = greedy_max_weight_basis(spec, mu)?;
    if spec.ground_size() <= ENUMERATION_LIMIT {
        let brute = enumerate_bases(spec)?
            .iter()
            .map(|b| b.weight(mu))
            .fold(f64::NEG_INFINITY, f64::max);
        let got = best.weight(mu);
        if (got - brute).abs() > 1e-12 * brute.abs().max(1.0) {
            return Err(Error::Internal(format!("greedy value {got} differs from enumerated optimum {brute}")));
        }
    }
    Ok(best)
}

/// Per-arm gaps against the optimal base.
///
/// `optimal` lists the optimal arms by descending mean. For a suboptimal arm
/// `k`, `gaps[k][j] = mu[optimal[j]] - mu[k]` and `depth[k]` is the largest
/// `j` (1-based) with a positive gap, 0 if none.
#[derive(Debug, Clone, PartialEq)]
pub struct GapDecomposition {
    pub optimal: Vec<usize>,
    pub suboptimal: Vec<usize>,
    pub gaps: Vec<Vec<f64>>,
    pub depth: Vec<usize>,
    pub delta_min: Option<f64>,
}

impl GapDecomposition {
    pub fn new(mu: &[f64], best: &Basis) -> Self {
        let mut optimal = best.members().to_vec();
        optimal.sort_by(|&x, &y| mu[y].total_cmp(&mu[x]).then(x.cmp(&y)));
        let suboptimal: Vec<usize> = (0..mu.len()).filter(|&k| !best.contains(k)).collect();
        let mut gaps = vec![Vec::new(); mu.len()];
        let mut depth = vec![0; mu.len()];
        let mut delta_min: Option<f64> = None;
        for &k in &suboptimal {
            gaps[k] = optimal.iter().map(|&j| mu[j] - mu[k]).collect();
            depth[k] = gaps[k].iter().rposition(|&g| g > 0.0).map_or(0, |j| j + 1);
            if depth[k] > 0 {
                let g = gaps[k][depth[k] - 1];
                delta_min = Some(delta_min.map_or(g, |d| d.min(g)));
            }
        }
        Self {
            optimal,
            suboptimal,
            gaps,
            depth,
            delta_min,
        }
    }

    /// `max{K, exp((b / delta_min)^(1/m))}`, or `K` without a positive gap.
    pub fn t0(&self, k: usize, b: f64, m: u32) -> f64 {
        match self.delta_min {
            Some(d) => (k as f64).max((b / d).powf(1.0 / m as f64).exp()),
            None => k as f64,
        }
    }

    /// Upper bound on the expected regret of FasterCUCB after `horizon` rounds.
    ///
    /// For `T <= T0` this is the trivial `D b T0`. Returns infinity if a
    /// shrunken gap is not positive even though `T > T0`.
    pub fn theorem_bound(&self, mu: &[f64], range: &RewardRange, horizon: u64, m: u32) -> f64 {
        let k_total = mu.len();
        let d = self.optimal.len() as f64;
        let t0 = self.t0(k_total, range.b, m);
        let t = horizon as f64;
        if t <= t0 {
            return d * range.b * t0;
        }
        let log_t = t.ln();
        let shrink = 1.0 + log_t.powi(-(m as i32));
        let mut total = d * range.b * t0;
        for &k in &self.suboptimal {
            let dk = self.depth[k];
            if dk == 0 {
                continue;
            }
            let gap_sum: f64 = self.gaps[k][..dk].iter().sum();
            let deepest = self.gaps[k][dk - 1];
            let denom = mu[self.optimal[dk - 1]] / shrink - mu[k];
            if denom <= 0.0 {
                return f64::INFINITY;
            }
            total += gap_sum * t0;
            total += 12.0 * deepest * range.width().powi(2) * log_t / denom.powi(2);
            total += gap_sum * (1.0 / t + PI * PI / 6.0);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_arm_gap() {
        let spec = MatroidSpec::uniform(2, 1).unwrap();
        let mu = [0.8, 0.2];
        let best = oracle_best_action(&mu, &spec).unwrap();
        assert_eq!(best.members(), &[0]);
        let g = GapDecomposition::new(&mu, &best);
        assert!((g.delta_min.unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(g.depth[1], 1);
    }

    #[test]
    fn depth_and_delta_min() {
        let spec = MatroidSpec::uniform(4, 2).unwrap();
        // optimal by mean: 0 (0.9), 2 (0.6); arm 1 (0.6) ties the second
        let mu = [0.9, 0.6, 0.6, 0.3];
        let best = oracle_best_action(&mu, &spec).unwrap();
        let g = GapDecomposition::new(&mu, &best);
        assert_eq!(g.optimal, vec![0, 1]);
        assert_eq!(g.depth[2], 1);
        assert_eq!(g.depth[3], 2);
        assert!((g.delta_min.unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn bound_by_hand() {
        let spec = MatroidSpec::uniform(2, 1).unwrap();
        let mu = [0.8, 0.2];
        let range = RewardRange::new(0.1, 0.9).unwrap();
        let best = oracle_best_action(&mu, &spec).unwrap();
        let g = GapDecomposition::new(&mu, &best);
        let t0 = (0.9f64 / 0.6).exp();
        assert!((g.t0(2, 0.9, 1) - t0).abs() < 1e-12);
        let horizon = 100_000u64;
        let lt = (horizon as f64).ln();
        let denom = 0.8 / (1.0 + 1.0 / lt) - 0.2;
        let want = 0.6 * t0
            + 12.0 * 0.6 * 0.64 * lt / (denom * denom)
            + 0.6 * (1.0 / horizon as f64 + PI * PI / 6.0)
            + 0.9 * t0;
        let got = g.theorem_bound(&mu, &range, horizon, 1);
        assert!((got - want).abs() < 1e-9 * want);
        // inside the warm-up horizon only the trivial term remains
        assert!((g.theorem_bound(&mu, &range, 3, 1) - 0.9 * t0).abs() < 1e-12);
    }

    #[test]
    fn zero_gap_instance() {
        let spec = MatroidSpec::uniform(3, 1).unwrap();
        let mu = [0.5; 3];
        let g = GapDecomposition::new(&mu, &oracle_best_action(&mu, &spec).unwrap());
        assert_eq!(g.delta_min, None);
        assert_eq!(g.t0(3, 0.9, 1), 3.0);
    }
}
