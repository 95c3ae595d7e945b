//! Incremental independence oracles: each answers "is the current set plus
//! arm k still independent?" without revisiting the whole set.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

use super::{MatroidSpec, Structure, UnionFind};

#[derive(Debug, Clone)]
enum OracleState {
    /// Cardinality is tracked by `Membership::members`.
    Uniform,
    Partition { occupancy: Vec<u32> },
    Graphical { forest: UnionFind },
    Transversal(MatchingState),
}

#[derive(Debug, Clone)]
struct MatchingState {
    match_of_arm: Vec<Option<usize>>,
    match_of_vertex: Vec<Option<usize>>,
    // BFS scratch, reused between queries via a generation stamp.
    seen: Vec<u32>,
    parent: Vec<usize>,
    stamp: u32,
    queue: Vec<usize>,
    /// Augmenting path found by the last successful query, as (arm, vertex) pairs.
    pending: Option<(usize, Vec<(usize, usize)>)>,
}

impl MatchingState {
    fn new(arms: usize, vertices: usize) -> Self {
        Self {
            match_of_arm: vec![None; arms],
            match_of_vertex: vec![None; vertices],
            seen: vec![0; vertices],
            parent: vec![0; vertices],
            stamp: 0,
            queue: Vec::new(),
            pending: None,
        }
    }

    fn reset(&mut self) {
        self.match_of_arm.fill(None);
        self.match_of_vertex.fill(None);
        self.pending = None;
    }

    /// Breadth-first search for an augmenting path starting at `arm`.
    fn augmenting_path(&mut self, arm: usize, adjacency: &[Vec<usize>]) -> Option<Vec<(usize, usize)>> {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.fill(0);
            self.stamp = 1;
        }
        self.queue.clear();
        self.queue.push(arm);
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            for &v in &adjacency[u] {
                if self.seen[v] == self.stamp {
                    continue;
                }
                self.seen[v] = self.stamp;
                self.parent[v] = u;
                match self.match_of_vertex[v] {
                    None => {
                        // Walk back: v is matched to parent[v], whose old
                        // partner is freed for the previous arm on the path.
                        let mut path = Vec::new();
                        let mut vertex = v;
                        loop {
                            let left = self.parent[vertex];
                            path.push((left, vertex));
                            if left == arm {
                                return Some(path);
                            }
                            vertex = self.match_of_arm[left].expect("path arm must be matched");
                        }
                    }
                    Some(w) => self.queue.push(w),
                }
            }
        }
        None
    }

    fn apply(&mut self, path: &[(usize, usize)]) {
        for &(arm, vertex) in path {
            self.match_of_arm[arm] = Some(vertex);
            self.match_of_vertex[vertex] = Some(arm);
        }
    }
}

/// Incremental membership state for one independent set of `spec`.
#[derive(Debug, Clone)]
pub struct Membership<'a> {
    spec: &'a MatroidSpec,
    inserted: FixedBitSet,
    members: Vec<usize>,
    state: OracleState,
}

impl<'a> Membership<'a> {
    pub fn new(spec: &'a MatroidSpec) -> Self {
        let state = match spec.structure() {
            Structure::Uniform => OracleState::Uniform,
            Structure::Partition { .. } => OracleState::Partition {
                occupancy: vec![0; spec.rank()],
            },
            Structure::Graphical { vertices, .. } => OracleState::Graphical {
                forest: UnionFind::new(*vertices),
            },
            Structure::Transversal { right, .. } => {
                OracleState::Transversal(MatchingState::new(spec.ground_size(), *right))
            }
        };
        Self {
            spec,
            inserted: FixedBitSet::with_capacity(spec.ground_size()),
            members: Vec::with_capacity(spec.rank()),
            state,
        }
    }

    pub fn spec(&self) -> &'a MatroidSpec {
        self.spec
    }

    /// Back to the empty set.
    pub fn reset(&mut self) {
        self.inserted.clear();
        self.members.clear();
        match &mut self.state {
            OracleState::Uniform => {}
            OracleState::Partition { occupancy } => occupancy.fill(0),
            OracleState::Graphical { forest } => forest.reset(),
            OracleState::Transversal(m) => m.reset(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.spec.rank()
    }

    /// Members in insertion order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, k: usize) -> bool {
        self.inserted.contains(k)
    }

    /// Whether the current set plus arm `k` is independent.
    pub fn insertable(&mut self, k: usize) -> Result<bool> {
        self.spec.check_arm(k)?;
        if self.inserted.contains(k) {
            return Err(Error::Contract(format!("arm {k} is already in the set")));
        }
        Ok(match (&mut self.state, self.spec.structure()) {
            (OracleState::Uniform, _) => self.members.len() < self.spec.rank(),
            (OracleState::Partition { occupancy }, Structure::Partition { part_of }) => {
                occupancy[part_of[k]] == 0
            }
            (OracleState::Graphical { forest }, Structure::Graphical { edges, .. }) => {
                let (u, v) = edges[k];
                !forest.connected(u, v)
            }
            (OracleState::Transversal(m), Structure::Transversal { adjacency, .. }) => {
                match m.augmenting_path(k, adjacency) {
                    Some(path) => {
                        m.pending = Some((k, path));
                        true
                    }
                    None => false,
                }
            }
            _ => unreachable!("oracle state always matches the matroid structure"),
        })
    }

    /// Commits arm `k`; it must currently be insertable.
    pub fn insert(&mut self, k: usize) -> Result<()> {
        if !self.insertable(k)? {
            return Err(Error::Contract(format!(
                "arm {k} cannot be added without breaking independence"
            )));
        }
        match (&mut self.state, self.spec.structure()) {
            (OracleState::Uniform, _) => {}
            (OracleState::Partition { occupancy }, Structure::Partition { part_of }) => {
                occupancy[part_of[k]] += 1;
            }
            (OracleState::Graphical { forest }, Structure::Graphical { edges, .. }) => {
                let (u, v) = edges[k];
                forest.union(u, v);
            }
            (OracleState::Transversal(m), _) => {
                let (arm, path) = m.pending.take().expect("insertable just stored the path");
                debug_assert_eq!(arm, k);
                m.apply(&path);
            }
            _ => unreachable!("oracle state always matches the matroid structure"),
        }
        self.inserted.insert(k);
        self.members.push(k);
        Ok(())
    }

    /// Inserts `k` if that keeps the set independent.
    pub fn try_insert(&mut self, k: usize) -> Result<bool> {
        if self.insertable(k)? {
            self.insert(k)?;
            Ok(true)
        } else {
            Ok(false)
        }
    }
}
