use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matroid::MatroidSpec;

use super::ordered::{tree_steps, RankKey};
use super::{check_update, DynamicBase};

/// Top-D of a uniform matroid, kept as one ordered set of all arms.
#[derive(Debug, Clone)]
pub struct UniformBase {
    spec: Arc<MatroidSpec>,
    weights: Vec<f64>,
    order: BTreeSet<RankKey>,
    ops: u64,
}

impl UniformBase {
    pub(crate) fn new(spec: Arc<MatroidSpec>, weights: Vec<f64>) -> Self {
        let order = weights
            .iter()
            .enumerate()
            .map(|(k, &w)| RankKey::new(w, k))
            .collect();
        Self {
            spec,
            weights,
            order,
            ops: 0,
        }
    }
}

impl DynamicBase for UniformBase {
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
        self.order.remove(&RankKey::new(old, k));
        self.order.insert(RankKey::new(w, k));
        self.weights[k] = w;
        self.ops += 2 * tree_steps(self.order.len());
        Ok(())
    }

    fn base_members(&mut self) -> Vec<usize> {
        let mut members: Vec<usize> = self
            .order
            .iter()
            .take(self.spec.rank())
            .map(|key| key.arm as usize)
            .collect();
        members.sort_unstable();
        members
    }

    fn op_count(&self) -> u64 {
        self.ops
    }

    fn audit(&self) -> Result<()> {
        if self.order.len() != self.weights.len() {
            return Err(Error::Internal("uniform order set lost an arm".into()));
        }
        for key in &self.order {
            if self.weights[key.arm as usize].total_cmp(&key.weight).is_ne() {
                return Err(Error::Internal(format!(
                    "uniform order holds stale weight for arm {}",
                    key.arm
                )));
            }
        }
        Ok(())
    }
}
