use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matroid::{MatroidSpec, Structure};

use super::ordered::{tree_steps, RankKey};
use super::{check_update, DynamicBase};

/// One ordered set per part; the base is the head of each.
#[derive(Debug, Clone)]
pub struct PartitionBase {
    spec: Arc<MatroidSpec>,
    weights: Vec<f64>,
    parts: Vec<BTreeSet<RankKey>>,
    ops: u64,
}

impl PartitionBase {
    pub(crate) fn new(spec: Arc<MatroidSpec>, weights: Vec<f64>) -> Self {
        let mut parts = vec![BTreeSet::new(); spec.rank()];
        for (k, &w) in weights.iter().enumerate() {
            parts[part_of(&spec)[k]].insert(RankKey::new(w, k));
        }
        Self {
            spec,
            weights,
            parts,
            ops: 0,
        }
    }
}

fn part_of(spec: &MatroidSpec) -> &[usize] {
    match spec.structure() {
        Structure::Partition { part_of } => part_of,
        _ => unreachable!("PartitionBase built only for partition matroids"),
    }
}

impl DynamicBase for PartitionBase {
    fn spec(&self) -> &MatroidSpec {
        &self.spec
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn update_weight(&mut self, k: usize, w: f64) -> Result<()> {
        check_update(&self.spec, k, w)?;
        let old = self.weights[k];
        if old.total_cmp(&w).is_eq() {
            return Ok(());
        }
        let part = &mut self.parts[part_of(&self.spec)[k]];
        part.remove(&RankKey::new(old, k));
        part.insert(RankKey::new(w, k));
        self.ops += 2 * tree_steps(part.len());
        self.weights[k] = w;
        Ok(())
    }

    fn base_members(&mut self) -> Vec<usize> {
        let mut members: Vec<usize> = self
            .parts
            .iter()
            .map(|p| p.first().expect("every part is non-empty").arm as usize)
            .collect();
        members.sort_unstable();
        members
    }

    fn op_count(&self) -> u64 {
        self.ops
    }

    fn audit(&self) -> Result<()> {
        let part_of = part_of(&self.spec);
        let total: usize = self.parts.iter().map(|p| p.len()).sum();
        if total != self.weights.len() {
            return Err(Error::Internal("partition sets lost an arm".into()));
        }
        for (i, part) in self.parts.iter().enumerate() {
            for key in part {
                let k = key.arm as usize;
                if part_of[k] != i || self.weights[k].total_cmp(&key.weight).is_ne() {
                    return Err(Error::Internal(format!("partition entry for arm {k} is stale")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_part_maximum() {
        let spec = Arc::new(MatroidSpec::partition(vec![0, 0, 1, 1]).unwrap());
        let mut b = PartitionBase::new(spec, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(b.base_members(), vec![1, 3]);
        b.update_weight(0, 5.0).unwrap();
        b.update_weight(3, 0.0).unwrap();
        assert_eq!(b.base_members(), vec![0, 2]);
        b.audit().unwrap();
    }
}
