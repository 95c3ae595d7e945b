use fixedbitset::FixedBitSet;

use crate::error::{input_err, Result};

/// A set of arms stored both as a sorted member list and as a K-bit indicator.
///
/// Used for bases and, more loosely, for any independent set handed back by
/// the oracles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Basis {
    members: Vec<usize>,
    indicator: FixedBitSet,
}

impl Basis {
    pub fn from_members(ground_size: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        let mut indicator = FixedBitSet::with_capacity(ground_size);
        for w in members.windows(2) {
            if w[0] == w[1] {
                return Err(input_err!("arm {} listed twice", w[0]));
            }
        }
        for &k in &members {
            if k >= ground_size {
                return Err(input_err!("arm {k} out of range 0..{ground_size}"));
            }
            indicator.insert(k);
        }
        Ok(Self { members, indicator })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn into_members(self) -> Vec<usize> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ground_size(&self) -> usize {
        self.indicator.len()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indicator.contains(k)
    }

    pub fn indicator(&self) -> &FixedBitSet {
        &self.indicator
    }

    /// Sum of `weights` over the members.
    pub fn weight(&self, weights: &[f64]) -> f64 {
        self.members.iter().map(|&k| weights[k]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_sorted_and_indicator_agrees() {
        let b = Basis::from_members(6, vec![4, 1, 3]).unwrap();
        assert_eq!(b.members(), &[1, 3, 4]);
        let ones: Vec<usize> = b.indicator().ones().collect();
        assert_eq!(ones, vec![1, 3, 4]);
        assert!(b.contains(3) && !b.contains(2));
        assert_eq!(b.weight(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), 2.0 + 4.0 + 5.0);
    }

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        assert!(Basis::from_members(4, vec![1, 1]).is_err());
        assert!(Basis::from_members(4, vec![4]).is_err());
    }
}
