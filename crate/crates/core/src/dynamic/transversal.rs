use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matroid::{greedy_max_weight_basis, MatroidSpec};

use super::{check_update, DynamicBase};

/// Reference structure: updates only mark the base stale; the next retrieval
/// reruns the greedy algorithm with the matching oracle.
#[derive(Debug, Clone)]
pub struct TransversalBase {
    spec: Arc<MatroidSpec>,
    weights: Vec<f64>,
    base: Vec<usize>,
    dirty: bool,
    ops: u64,
}

impl TransversalBase {
    pub(crate) fn new(spec: Arc<MatroidSpec>, weights: Vec<f64>) -> Result<Self> {
        let base = greedy_max_weight_basis(&spec, &weights)?.into_members();
        Ok(Self {
            ops: spec.ground_size() as u64,
            spec,
            weights,
            base,
            dirty: false,
        })
    }
}

impl DynamicBase for TransversalBase {
    fn spec(&self) -> &MatroidSpec {
        &self.spec
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn update_weight(&mut self, k: usize, w: f64) -> Result<()> {
        check_update(&self.spec, k, w)?;
        if self.weights[k].total_cmp(&w).is_ne() {
            self.weights[k] = w;
            self.dirty = true;
        }
        self.ops += 1;
        Ok(())
    }

    fn base_members(&mut self) -> Vec<usize> {
        if self.dirty {
            self.base = greedy_max_weight_basis(&self.spec, &self.weights)
                .expect("weights were validated on update")
                .into_members();
            self.ops += self.spec.ground_size() as u64;
            self.dirty = false;
        }
        self.base.clone()
    }

    fn op_count(&self) -> u64 {
        self.ops
    }

    fn audit(&self) -> Result<()> {
        if self.dirty {
            return Ok(());
        }
        let fresh = greedy_max_weight_basis(&self.spec, &self.weights)?;
        if fresh.members() != self.base.as_slice() {
            return Err(Error::Internal("cached transversal base is stale".into()));
        }
        Ok(())
    }
}
