use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matroid::{greedy_max_weight_basis, MatroidSpec, Structure, UnionFind};

use super::{check_update, DynamicBase};

const NOT_IN_FOREST: usize = usize::MAX;

/// Maximum-weight spanning forest with cut/cycle repairs.
///
/// An in-forest edge losing weight is cut out and replaced by the heaviest
/// edge across the cut, found by scanning every edge (O(K)). A non-forest
/// edge gaining weight is compared against the lightest edge on the forest
/// path between its endpoints (O(D)).
#[derive(Debug, Clone)]
pub struct GraphicalBase {
    spec: Arc<MatroidSpec>,
    weights: Vec<f64>,
    slot: Vec<usize>,
    forest: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    seen: Vec<u32>,
    parent_edge: Vec<usize>,
    stamp: u32,
    queue: Vec<usize>,
    ops: u64,
}

fn edges(spec: &MatroidSpec) -> &[(usize, usize)] {
    match spec.structure() {
        Structure::Graphical { edges, .. } => edges,
        _ => unreachable!("GraphicalBase built only for graphical matroids"),
    }
}

// true if edge `a` should be preferred over edge `b`
fn heavier(weights: &[f64], a: usize, b: usize) -> bool {
    match weights[a].total_cmp(&weights[b]) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => a < b,
    }
}

impl GraphicalBase {
    pub(crate) fn new(spec: Arc<MatroidSpec>, weights: Vec<f64>) -> Result<Self> {
        let vertices = match spec.structure() {
            Structure::Graphical { vertices, .. } => *vertices,
            _ => unreachable!("GraphicalBase built only for graphical matroids"),
        };
        let initial = greedy_max_weight_basis(&spec, &weights)?;
        let mut base = Self {
            slot: vec![NOT_IN_FOREST; spec.ground_size()],
            forest: Vec::with_capacity(spec.rank()),
            adjacency: vec![Vec::new(); vertices],
            seen: vec![0; vertices],
            parent_edge: vec![NOT_IN_FOREST; vertices],
            stamp: 0,
            queue: Vec::new(),
            ops: 0,
            spec,
            weights,
        };
        for &e in initial.members() {
            base.link(e);
        }
        Ok(base)
    }

    pub fn in_forest(&self, e: usize) -> bool {
        self.slot[e] != NOT_IN_FOREST
    }

    fn link(&mut self, e: usize) {
        let (u, v) = edges(&self.spec)[e];
        self.slot[e] = self.forest.len();
        self.forest.push(e);
        self.adjacency[u].push(e);
        self.adjacency[v].push(e);
    }

    fn cut(&mut self, e: usize) {
        let (u, v) = edges(&self.spec)[e];
        let pos = self.slot[e];
        self.forest.swap_remove(pos);
        if let Some(&moved) = self.forest.get(pos) {
            self.slot[moved] = pos;
        }
        self.slot[e] = NOT_IN_FOREST;
        for x in [u, v] {
            let list = &mut self.adjacency[x];
            let i = list.iter().position(|&f| f == e).expect("forest edge is in adjacency");
            list.swap_remove(i);
        }
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.fill(0);
            self.stamp = 1;
        }
        self.stamp
    }

    /// Marks every vertex reachable from `start` through forest edges.
    fn mark_tree(&mut self, start: usize) -> u32 {
        let stamp = self.next_stamp();
        let all = edges(&self.spec);
        self.queue.clear();
        self.queue.push(start);
        self.seen[start] = stamp;
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            for &f in &self.adjacency[x] {
                let (a, b) = all[f];
                let y = if a == x { b } else { a };
                if self.seen[y] != stamp {
                    self.seen[y] = stamp;
                    self.queue.push(y);
                }
            }
            self.ops += 1;
        }
        stamp
    }

    /// Forest edges on the path from `from` to `to`.
    fn path(&mut self, from: usize, to: usize) -> Vec<usize> {
        let stamp = self.next_stamp();
        let all = edges(&self.spec);
        self.queue.clear();
        self.queue.push(from);
        self.seen[from] = stamp;
        let mut head = 0;
        while head < self.queue.len() && self.seen[to] != stamp {
            let x = self.queue[head];
            head += 1;
            for &f in &self.adjacency[x] {
                let (a, b) = all[f];
                let y = if a == x { b } else { a };
                if self.seen[y] != stamp {
                    self.seen[y] = stamp;
                    self.parent_edge[y] = f;
                    self.queue.push(y);
                }
            }
            self.ops += 1;
        }
        let mut out = Vec::new();
        let mut x = to;
        while x != from {
            let f = self.parent_edge[x];
            out.push(f);
            let (a, b) = all[f];
            x = if a == x { b } else { a };
        }
        out
    }

    fn repair_after_decrease(&mut self, e: usize) {
        let (u, _) = edges(&self.spec)[e];
        self.cut(e);
        let side = self.mark_tree(u);
        let mut best = e;
        for (f, &(a, b)) in edges(&self.spec).iter().enumerate() {
            if self.in_forest(f) {
                continue;
            }
            let crosses = (self.seen[a] == side) != (self.seen[b] == side);
            if crosses && heavier(&self.weights, f, best) {
                best = f;
            }
        }
        self.ops += self.weights.len() as u64;
        self.link(best);
    }

    fn repair_after_increase(&mut self, e: usize) {
        let (u, v) = edges(&self.spec)[e];
        if u == v {
            return;
        }
        let path = self.path(u, v);
        let lightest = path
            .iter()
            .copied()
            .reduce(|acc, f| if heavier(&self.weights, acc, f) { f } else { acc })
            .expect("endpoints of a non-forest edge are joined by the forest");
        if self.weights[e] > self.weights[lightest] {
            self.cut(lightest);
            self.link(e);
        }
    }
}

impl DynamicBase for GraphicalBase {
    fn spec(&self) -> &MatroidSpec {
        &self.spec
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn update_weight(&mut self, k: usize, w: f64) -> Result<()> {
        check_update(&self.spec, k, w)?;
        let old = self.weights[k];
        self.weights[k] = w;
        match (self.in_forest(k), w.total_cmp(&old)) {
            (_, std::cmp::Ordering::Equal) => {}
            (true, std::cmp::Ordering::Less) => self.repair_after_decrease(k),
            (false, std::cmp::Ordering::Greater) => self.repair_after_increase(k),
            _ => {}
        }
        self.ops += 1;
        Ok(())
    }

    fn base_members(&mut self) -> Vec<usize> {
        let mut members = self.forest.clone();
        members.sort_unstable();
        members
    }

    fn op_count(&self) -> u64 {
        self.ops
    }

    /// Forest must be acyclic with exactly `rank` edges.
    fn audit(&self) -> Result<()> {
        let vertices = self.adjacency.len();
        let mut uf = UnionFind::new(vertices);
        for &e in &self.forest {
            let (u, v) = edges(&self.spec)[e];
            if !uf.union(u, v) {
                return Err(Error::Internal(format!("forest edge {e} closes a cycle")));
            }
            if self.slot[e] == NOT_IN_FOREST {
                return Err(Error::Internal(format!("forest edge {e} has no slot")));
            }
        }
        if self.forest.len() != self.spec.rank() {
            return Err(Error::Internal(format!(
                "forest has {} edges, rank is {}",
                self.forest.len(),
                self.spec.rank()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(weights: Vec<f64>) -> GraphicalBase {
        let spec = Arc::new(MatroidSpec::graphical(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap());
        GraphicalBase::new(spec, weights).unwrap()
    }

    #[test]
    fn raising_non_forest_edge_swaps_out_lightest_on_path() {
        let mut g = triangle(vec![5.0, 4.0, 3.0]);
        assert_eq!(g.base_members(), vec![0, 1]);
        g.update_weight(2, 4.5).unwrap();
        assert_eq!(g.base_members(), vec![0, 2]);
        g.audit().unwrap();
    }

    #[test]
    fn lowering_forest_edge_pulls_in_best_crossing_edge() {
        let mut g = triangle(vec![5.0, 4.0, 3.0]);
        g.update_weight(0, 1.0).unwrap();
        assert_eq!(g.base_members(), vec![1, 2]);
        g.audit().unwrap();
        // still the best across its own cut: stays
        g.update_weight(1, 3.5).unwrap();
        assert_eq!(g.base_members(), vec![1, 2]);
    }

    #[test]
    fn no_op_updates() {
        let mut g = triangle(vec![5.0, 4.0, 3.0]);
        g.update_weight(0, 9.0).unwrap();
        g.update_weight(2, 1.0).unwrap();
        assert_eq!(g.base_members(), vec![0, 1]);
    }

    #[test]
    fn self_loop_never_enters() {
        let spec = Arc::new(MatroidSpec::graphical(2, vec![(0, 1), (1, 1)]).unwrap());
        let mut g = GraphicalBase::new(spec, vec![1.0, 0.0]).unwrap();
        g.update_weight(1, 100.0).unwrap();
        assert_eq!(g.base_members(), vec![0]);
    }
}
