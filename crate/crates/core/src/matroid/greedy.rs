use std::cmp::Ordering;

use crate::error::{input_err, Error, Result};

use super::{Basis, MatroidSpec, Membership};

/// How equal weights are ordered in the greedy scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    AscendingIndex,
    /// Only used to check that the verification suites notice a changed order.
    DescendingIndex,
}

/// Scan order: non-increasing weight, ties by arm index per `tie`.
pub fn weight_order(weights: &[f64], tie: TieBreak) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_unstable_by(|&i, &j| {
        weights[j].total_cmp(&weights[i]).then_with(|| match tie {
            TieBreak::AscendingIndex => i.cmp(&j),
            TieBreak::DescendingIndex => j.cmp(&i),
        })
    });
    order
}

/// Greedy over an explicit scan order, stopping once the set reaches the rank.
pub fn greedy_in_order<I>(spec: &MatroidSpec, order: I) -> Result<Basis>
where
    I: IntoIterator<Item = usize>,
{
    let mut m = Membership::new(spec);
    for k in order {
        if m.contains(k) {
            continue;
        }
        m.try_insert(k)?;
        if m.is_full() {
            return Basis::from_members(spec.ground_size(), m.members().to_vec());
        }
    }
    Err(Error::Internal(format!(
        "greedy scan exhausted at {} of rank {}",
        m.len(),
        spec.rank()
    )))
}

/// Maximum-weight basis by the greedy algorithm (ties by ascending arm index).
pub fn greedy_max_weight_basis(spec: &MatroidSpec, weights: &[f64]) -> Result<Basis> {
    greedy_max_weight_basis_with(spec, weights, TieBreak::AscendingIndex)
}

pub fn greedy_max_weight_basis_with(
    spec: &MatroidSpec,
    weights: &[f64],
    tie: TieBreak,
) -> Result<Basis> {
    if weights.len() != spec.ground_size() {
        return Err(input_err!(
            "expected {} weights, got {}",
            spec.ground_size(),
            weights.len()
        ));
    }
    if let Some(k) = weights.iter().position(|w| !w.is_finite()) {
        return Err(input_err!("weight of arm {k} is not finite"));
    }
    greedy_in_order(spec, weight_order(weights, tie))
}

/// The basis obtained by scanning `k` first and then every other arm in
/// ascending order; always contains `k` unless `k` is a loop.
pub fn greedy_with_forced_first(spec: &MatroidSpec, k: usize) -> Result<Basis> {
    spec.check_arm(k)?;
    let n = spec.ground_size();
    greedy_in_order(spec, std::iter::once(k).chain((0..n).filter(move |&j| j != k)))
}

pub const ENUMERATION_LIMIT: usize = 20;

/// Every basis of `spec`, by checking all rank-sized subsets. Test oracle only.
pub fn enumerate_bases(spec: &MatroidSpec) -> Result<Vec<Basis>> {
    let n = spec.ground_size();
    if n > ENUMERATION_LIMIT {
        return Err(Error::Refused(format!(
            "basis enumeration is limited to K <= {ENUMERATION_LIMIT}, got K={n}"
        )));
    }
    let d = spec.rank() as u32;
    let mut out = Vec::new();
    let mut m = Membership::new(spec);
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() != d {
            continue;
        }
        m.reset();
        let mut independent = true;
        for k in (0..n).filter(|k| mask >> k & 1 == 1) {
            if !m.try_insert(k)? {
                independent = false;
                break;
            }
        }
        if independent {
            out.push(Basis::from_members(n, m.members().to_vec())?);
        }
    }
    Ok(out)
}

/// Orders bases by weight, then prefers the lexicographically smaller member
/// list. The maximum under this order is what the ascending-index greedy returns.
pub fn canonical_cmp(a: &Basis, b: &Basis, weights: &[f64]) -> Ordering {
    a.weight(weights)
        .total_cmp(&b.weight(weights))
        .then_with(|| b.members().cmp(a.members()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> MatroidSpec {
        MatroidSpec::graphical(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn uniform_top_two() {
        let spec = MatroidSpec::uniform(4, 2).unwrap();
        let b = greedy_max_weight_basis(&spec, &[3.0, 1.0, 2.0, 0.0]).unwrap();
        assert_eq!(b.members(), &[0, 2]);
    }

    #[test]
    fn graphical_skips_cycle_edge() {
        let b = greedy_max_weight_basis(&triangle(), &[5.0, 4.0, 3.0]).unwrap();
        assert_eq!(b.members(), &[0, 1]);
    }

    #[test]
    fn negative_weights_still_fill_rank() {
        let spec = MatroidSpec::uniform(3, 2).unwrap();
        let b = greedy_max_weight_basis(&spec, &[-1.0, -3.0, -2.0]).unwrap();
        assert_eq!(b.members(), &[0, 2]);
    }

    #[test]
    fn ties_follow_index_order() {
        let spec = MatroidSpec::uniform(4, 2).unwrap();
        let w = [1.0; 4];
        assert_eq!(greedy_max_weight_basis(&spec, &w).unwrap().members(), &[0, 1]);
        let flipped = greedy_max_weight_basis_with(&spec, &w, TieBreak::DescendingIndex).unwrap();
        assert_eq!(flipped.members(), &[2, 3]);
    }

    #[test]
    fn rejects_bad_weights() {
        let spec = MatroidSpec::uniform(2, 1).unwrap();
        assert!(greedy_max_weight_basis(&spec, &[1.0]).is_err());
        assert!(greedy_max_weight_basis(&spec, &[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn forced_first_examples() {
        let u = MatroidSpec::uniform(4, 2).unwrap();
        assert_eq!(greedy_with_forced_first(&u, 3).unwrap().members(), &[0, 3]);
        let p = MatroidSpec::partition(vec![0, 0, 1, 1]).unwrap();
        assert_eq!(greedy_with_forced_first(&p, 1).unwrap().members(), &[1, 2]);
        // scan order 2, 0, 1: edge 2 then edge 0, edge 1 would close the cycle
        assert_eq!(greedy_with_forced_first(&triangle(), 2).unwrap().members(), &[0, 2]);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_bases(&MatroidSpec::uniform(4, 2).unwrap()).unwrap().len(), 6);
        assert_eq!(enumerate_bases(&triangle()).unwrap().len(), 3);
        let p = MatroidSpec::partition(vec![0, 0, 1, 1]).unwrap();
        assert_eq!(enumerate_bases(&p).unwrap().len(), 4);
        let big = MatroidSpec::uniform(21, 1).unwrap();
        assert!(matches!(enumerate_bases(&big), Err(Error::Refused(_))));
    }

    #[test]
    fn canonical_order_picks_greedy_basis_under_ties() {
        let spec = MatroidSpec::partition(vec![0, 1, 0, 1]).unwrap();
        let w = [1.0, 1.0, 1.0, 1.0];
        let best = enumerate_bases(&spec)
            .unwrap()
            .into_iter()
            .max_by(|a, b| canonical_cmp(a, b, &w))
            .unwrap();
        assert_eq!(best, greedy_max_weight_basis(&spec, &w).unwrap());
    }
}
