//! Rounds that pull every arm at least once before index-based play starts.

use crate::error::{Error, Result};
use crate::matroid::{greedy_in_order, greedy_with_forced_first, MatroidSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Force the smallest unpulled arm, then prefer other unpulled arms;
    /// stop as soon as every arm has been pulled.
    #[default]
    Coverage,
    /// One forced base per arm, `K` rounds in total.
    PerArm,
}

/// The bases pulled during initialization. They depend only on the matroid,
/// never on rewards, so the whole plan is fixed up front.
pub fn init_plan(spec: &MatroidSpec, mode: InitMode) -> Result<Vec<Vec<usize>>> {
    let k_total = spec.ground_size();
    match mode {
        InitMode::PerArm => (0..k_total)
            .map(|k| greedy_with_forced_first(spec, k).map(|b| b.into_members()))
            .collect(),
        InitMode::Coverage => {
            let mut pulled = vec![false; k_total];
            let mut next = 0usize;
            let mut plan = Vec::new();
            loop {
                while next < k_total && pulled[next] {
                    next += 1;
                }
                if next == k_total {
                    break;
                }
                let k = next;
                let flags = &pulled;
                let order = std::iter::once(k)
                    .chain((k + 1..k_total).filter(|&j| !flags[j]))
                    .chain((0..k_total).filter(|&j| flags[j]));
                let basis = greedy_in_order(spec, order)?.into_members();
                if !basis.contains(&k) {
                    return Err(Error::Refused(format!("arm {k} lies in no base and can never be pulled")));
                }
                for &j in &basis {
                    pulled[j] = true;
                }
                plan.push(basis);
            }
            Ok(plan)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_round_counts() {
        let s = MatroidSpec::uniform(3, 1).unwrap();
        assert_eq!(init_plan(&s, InitMode::Coverage).unwrap().len(), 3);
        let s = MatroidSpec::uniform(4, 2).unwrap();
        assert_eq!(init_plan(&s, InitMode::Coverage).unwrap(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(init_plan(&s, InitMode::PerArm).unwrap().len(), 4);
    }

    #[test]
    fn every_arm_covered_and_every_round_a_base() {
        let specs = [
            MatroidSpec::partition(vec![0, 0, 0, 1, 2, 2]).unwrap(),
            MatroidSpec::graphical(4, vec![(0, 1), (1, 2), (2, 0), (2, 3), (0, 3)]).unwrap(),
            MatroidSpec::transversal(2, vec![vec![0], vec![0], vec![1], vec![0, 1]]).unwrap(),
        ];
        let looped = MatroidSpec::graphical(2, vec![(0, 1), (1, 1)]).unwrap();
        assert!(matches!(init_plan(&looped, InitMode::Coverage), Err(Error::Refused(_))));
        for s in specs {
            for mode in [InitMode::Coverage, InitMode::PerArm] {
                let plan = init_plan(&s, mode).unwrap();
                let mut seen = vec![false; s.ground_size()];
                for b in &plan {
                    assert_eq!(b.len(), s.rank());
                    b.iter().for_each(|&k| seen[k] = true);
                }
                assert!(seen.iter().all(|&x| x));
            }
        }
    }
}
