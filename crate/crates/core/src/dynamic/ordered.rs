use std::cmp::Ordering;

/// Arm keyed for "heaviest first, then lowest index" iteration in a `BTreeSet`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RankKey {
    pub weight: f64,
    pub arm: u32,
}

impl RankKey {
    pub fn new(weight: f64, arm: usize) -> Self {
        Self {
            weight,
            arm: arm as u32,
        }
    }
}

impl PartialEq for RankKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for RankKey {}

impl PartialOrd for RankKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RankKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then_with(|| self.arm.cmp(&other.arm))
    }
}

/// Modelled cost of one ordered-set operation on `len` entries.
pub(crate) fn tree_steps(len: usize) -> u64 {
    (usize::BITS - len.max(1).leading_zeros()) as u64
}
