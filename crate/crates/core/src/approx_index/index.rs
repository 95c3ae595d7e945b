use std::sync::Arc;

use rayon::prelude::*;

use crate::dynamic::{dyn_init, DynamicBase, DynamicBaseInstance};
use crate::error::{input_err, Error, Result};
use crate::matroid::{Basis, MatroidSpec};

use super::hitting_set::{generate_hitting_set, grid_boundaries_in_cone, Coverage, HittingSet};
use super::rounding::{BinIndex, Bounds, Feature, Grid, Query};

/// `Auto` materializes every instance only while `cells * K` stays below this
/// and there are at most [`EAGER_CELL_LIMIT`] cells.
pub const EAGER_SLOT_LIMIT: usize = 1 << 24;
/// Every bin change costs one update per held instance.
pub const EAGER_CELL_LIMIT: usize = 4096;
/// Circle coverage enumerates all point pairs; refuse beyond this many points.
const CIRCLE_POINT_LIMIT: usize = 4096;
const PAR_UPDATE_MIN: usize = 512;

/// How the per-cell instances are held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstancePolicy {
    /// Build one instance per cell up front and keep all of them current.
    Eager,
    /// Build instances on first use from the current dominating points and
    /// keep at most `capacity` of them, evicting the least recently used.
    Lazy { capacity: usize },
    /// `Eager` below [`EAGER_CELL_LIMIT`] cells and [`EAGER_SLOT_LIMIT`]
    /// weight slots, else `Lazy` with a small cache.
    Auto,
}

#[derive(Debug, Clone)]
pub struct IndexOptions {
    pub epsilon: f64,
    pub coverage: Coverage,
    pub policy: InstancePolicy,
    /// Re-check on every lookup that the chosen cell orders the occupied
    /// dominating points consistently with the query.
    pub cross_check: bool,
    /// Reuse a hitting set built for the same bounds, epsilon and coverage.
    pub hitting_set: Option<Arc<HittingSet>>,
}

impl IndexOptions {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            coverage: Coverage::Circle,
            policy: InstancePolicy::Auto,
            cross_check: false,
            hitting_set: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IndexStats {
    pub feature_updates: u64,
    pub bin_changes: u64,
    /// Per-instance weight updates issued by `update_feature`.
    pub instance_updates: u64,
    pub lookups: u64,
    pub lazy_builds: u64,
    pub evictions: u64,
}

#[derive(Debug)]
enum Store {
    Eager(Vec<DynamicBaseInstance>),
    Lazy {
        capacity: usize,
        clock: u64,
        // (cell, instance, last use)
        slots: Vec<(usize, DynamicBaseInstance, u64)>,
    },
}

/// Dynamic (1+epsilon)-approximate maximum-weight base index.
#[derive(Debug)]
pub struct ApproxIndex {
    spec: Arc<MatroidSpec>,
    grid: Grid,
    epsilon: f64,
    features: Vec<Feature>,
    bins: Vec<BinIndex>,
    hitting_set: Arc<HittingSet>,
    store: Store,
    cross_check: bool,
    stats: IndexStats,
}

fn dot(p: [f64; 2], h: [f64; 2]) -> f64 {
    p[0] * h[0] + p[1] * h[1]
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(input_err!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    Ok(())
}

impl ApproxIndex {
    /// Builds the hitting set for the given bounds, epsilon and coverage.
    pub fn build_hitting_set(bounds: Bounds, epsilon: f64, coverage: Coverage) -> Result<HittingSet> {
        check_epsilon(epsilon)?;
        let grid = Grid::new(bounds, epsilon / 3.0)?;
        Self::hitting_set_for(&grid, coverage)
    }

    fn hitting_set_for(grid: &Grid, coverage: Coverage) -> Result<HittingSet> {
        match coverage {
            Coverage::Circle => {
                let pts = grid.arrangement_points();
                if pts.len() > CIRCLE_POINT_LIMIT {
                    return Err(Error::Refused(format!(
                        "{} arrangement points exceed the full-circle limit of {CIRCLE_POINT_LIMIT}; \
                         use a query cone or a larger epsilon",
                        pts.len()
                    )));
                }
                generate_hitting_set(&pts)
            }
            Coverage::Cone { lo, hi } => grid_boundaries_in_cone(grid, lo, hi),
        }
    }

    pub fn initialize(
        spec: Arc<MatroidSpec>,
        bounds: Bounds,
        features: Vec<Feature>,
        options: IndexOptions,
    ) -> Result<Self> {
        check_epsilon(options.epsilon)?;
        let k = spec.ground_size();
        if k == 0 {
            return Err(input_err!("index needs at least one arm"));
        }
        if features.len() != k {
            return Err(input_err!("expected {k} features, got {}", features.len()));
        }
        let eta = options.epsilon / 3.0;
        debug_assert!((1.0 + eta).powi(2) <= 1.0 + options.epsilon);
        let grid = Grid::new(bounds, eta)?;
        let bins = features.iter().map(|f| grid.bin_of(f)).collect::<Result<Vec<_>>>()?;
        let hitting_set = match options.hitting_set {
            Some(hs) => {
                if hs.coverage() != options.coverage {
                    return Err(input_err!("shared hitting set was built for different coverage"));
                }
                hs
            }
            None => Arc::new(Self::hitting_set_for(&grid, options.coverage)?),
        };
        let policy = match options.policy {
            InstancePolicy::Auto
                if hitting_set.len() <= EAGER_CELL_LIMIT
                    && hitting_set.len().saturating_mul(k) <= EAGER_SLOT_LIMIT =>
            {
                InstancePolicy::Eager
            }
            InstancePolicy::Auto => InstancePolicy::Lazy { capacity: 4 },
            InstancePolicy::Lazy { capacity: 0 } => {
                return Err(input_err!("lazy instance cache needs capacity >= 1"))
            }
            p => p,
        };
        let mut index = Self {
            spec,
            grid,
            epsilon: options.epsilon,
            features,
            bins,
            hitting_set,
            store: Store::Lazy {
                capacity: 1,
                clock: 0,
                slots: Vec::new(),
            },
            cross_check: options.cross_check,
            stats: IndexStats::default(),
        };
        index.store = match policy {
            InstancePolicy::Eager => {
                let cells: Vec<usize> = (0..index.hitting_set.len()).collect();
                let built = if cells.len() >= PAR_UPDATE_MIN && rayon::current_num_threads() > 1 {
                    cells.par_iter().map(|&c| index.build_instance(c)).collect::<Result<Vec<_>>>()?
                } else {
                    cells.iter().map(|&c| index.build_instance(c)).collect::<Result<Vec<_>>>()?
                };
                Store::Eager(built)
            }
            InstancePolicy::Lazy { capacity } => Store::Lazy {
                capacity,
                clock: 0,
                slots: Vec::with_capacity(capacity),
            },
            InstancePolicy::Auto => unreachable!(),
        };
        Ok(index)
    }

    fn weights_for(&self, h: [f64; 2]) -> Vec<f64> {
        self.bins.iter().map(|&b| dot(self.grid.dominating_point(b), h)).collect()
    }

    fn build_instance(&self, cell: usize) -> Result<DynamicBaseInstance> {
        dyn_init(self.spec.clone(), self.weights_for(self.hitting_set.vector(cell)))
    }

    pub fn spec(&self) -> &MatroidSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn eta(&self) -> f64 {
        self.grid.eta()
    }

    pub fn w(&self) -> u32 {
        self.grid.w()
    }

    pub fn hitting_set(&self) -> &Arc<HittingSet> {
        &self.hitting_set
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn bin_of_arm(&self, k: usize) -> BinIndex {
        self.bins[k]
    }

    pub fn dominating_point_of(&self, k: usize) -> [f64; 2] {
        self.grid.dominating_point(self.bins[k])
    }

    pub fn stats(&self) -> IndexStats {
        self.stats
    }

    pub fn is_eager(&self) -> bool {
        matches!(self.store, Store::Eager(_))
    }

    /// Number of instances currently held in memory.
    pub fn materialized(&self) -> usize {
        match &self.store {
            Store::Eager(v) => v.len(),
            Store::Lazy { slots, .. } => slots.len(),
        }
    }

    /// Cell of the hitting set whose closure contains `query`.
    pub fn locate(&self, query: Query) -> Result<usize> {
        query.validate()?;
        self.hitting_set.locate([query.q1, query.q2])
    }

    /// A base whose weight under the true features is at least
    /// `1/(1+epsilon)` times the optimum for `query`.
    pub fn find_base(&mut self, query: Query) -> Result<Basis> {
        let members = self.find_base_members(query)?;
        Basis::from_members(self.spec.ground_size(), members)
    }

    /// Like [`find_base`](Self::find_base), returning only the sorted members.
    pub fn find_base_members(&mut self, query: Query) -> Result<Vec<usize>> {
        let cell = self.locate(query)?;
        if self.cross_check {
            self.check_cell(cell, query)?;
        }
        self.stats.lookups += 1;
        Ok(self.instance_mut(cell)?.base_members())
    }

    /// Verifies that the strict order of occupied dominating points under the
    /// cell's vector never contradicts the order under `query`.
    pub fn check_cell(&self, cell: usize, query: Query) -> Result<()> {
        let h = self.hitting_set.vector(cell);
        let q = [query.q1, query.q2];
        let mut pts: Vec<[f64; 2]> = self.bins.iter().map(|&b| self.grid.dominating_point(b)).collect();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        let scale = |p: [f64; 2], v: [f64; 2]| 1e-9 * (p[0].abs() + p[1].abs()) * (v[0].abs() + v[1].abs());
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                let dh = dot(a, h) - dot(b, h);
                let dq = dot(a, q) - dot(b, q);
                let th = scale(a, h).max(scale(b, h));
                let tq = scale(a, q).max(scale(b, q));
                if (dh > th && dq < -tq) || (dh < -th && dq > tq) {
                    return Err(Error::Internal(format!(
                        "cell {cell} orders ({}, {}) and ({}, {}) against the query",
                        a[0], a[1], b[0], b[1]
                    )));
                }
            }
        }
        Ok(())
    }

    fn instance_mut(&mut self, cell: usize) -> Result<&mut DynamicBaseInstance> {
        let hit = match &self.store {
            Store::Eager(_) => None,
            Store::Lazy { slots, .. } => Some(slots.iter().position(|s| s.0 == cell)),
        };
        let fresh = match hit {
            Some(None) => Some(self.build_instance(cell)?),
            _ => None,
        };
        match &mut self.store {
            Store::Eager(v) => Ok(&mut v[cell]),
            Store::Lazy { capacity, clock, slots } => {
                *clock += 1;
                let pos = match fresh {
                    None => {
                        let pos = hit.flatten().expect("cached cell");
                        slots[pos].2 = *clock;
                        pos
                    }
                    Some(inst) => {
                        self.stats.lazy_builds += 1;
                        if slots.len() >= *capacity {
                            let lru = (0..slots.len()).min_by_key(|&i| slots[i].2).expect("non-empty cache");
                            slots.swap_remove(lru);
                            self.stats.evictions += 1;
                        }
                        slots.push((cell, inst, *clock));
                        slots.len() - 1
                    }
                };
                Ok(&mut slots[pos].1)
            }
        }
    }

    /// Replaces arm `k`'s feature. Instances are touched only if its bin moved.
    pub fn update_feature(&mut self, k: usize, f: Feature) -> Result<()> {
        self.spec.check_arm(k)?;
        let bin = self.grid.bin_of(&f)?;
        self.features[k] = f;
        self.stats.feature_updates += 1;
        if bin == self.bins[k] {
            return Ok(());
        }
        self.bins[k] = bin;
        self.stats.bin_changes += 1;
        let dom = self.grid.dominating_point(bin);
        let hs = &self.hitting_set;
        let updated = match &mut self.store {
            Store::Eager(v) => {
                if v.len() >= PAR_UPDATE_MIN && rayon::current_num_threads() > 1 {
                    v.par_iter_mut()
                        .enumerate()
                        .try_for_each(|(c, inst)| inst.update_weight(k, dot(dom, hs.vector(c))))?;
                } else {
                    for (c, inst) in v.iter_mut().enumerate() {
                        inst.update_weight(k, dot(dom, hs.vector(c)))?;
                    }
                }
                v.len()
            }
            Store::Lazy { slots, .. } => {
                for (c, inst, _) in slots.iter_mut() {
                    inst.update_weight(k, dot(dom, hs.vector(*c)))?;
                }
                slots.len()
            }
        };
        self.stats.instance_updates += updated as u64;
        Ok(())
    }

    /// Checks that every held instance stores exactly the dominating-point
    /// weights of its cell and is internally consistent.
    pub fn audit(&self) -> Result<()> {
        let held: Vec<(usize, &DynamicBaseInstance)> = match &self.store {
            Store::Eager(v) => v.iter().enumerate().collect(),
            Store::Lazy { slots, .. } => slots.iter().map(|(c, i, _)| (*c, i)).collect(),
        };
        for (cell, inst) in held {
            let expected = self.weights_for(self.hitting_set.vector(cell));
            if inst.weights() != expected.as_slice() {
                return Err(Error::Internal(format!("instance {cell} holds stale weights")));
            }
            inst.audit()?;
        }
        for (k, f) in self.features.iter().enumerate() {
            if self.grid.bin_of(f)? != self.bins[k] {
                return Err(Error::Internal(format!("arm {k} has a stale bin")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{enumerate_bases, greedy_max_weight_basis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_feature(rng: &mut ChaCha8Rng, b: &Bounds) -> Feature {
        let pick = |rng: &mut ChaCha8Rng, lb: f64, ub: f64| {
            if rng.gen_bool(0.1) {
                0.0
            } else {
                rng.gen_range(lb..=ub)
            }
        };
        Feature::new(pick(rng, b.alpha_lb, b.alpha_ub), pick(rng, b.beta_lb, b.beta_ub))
    }

    fn best_weight(spec: &MatroidSpec, w: &[f64]) -> f64 {
        enumerate_bases(spec)
            .unwrap()
            .iter()
            .map(|b| b.weight(w))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn same_bin_update_touches_nothing_and_crossing_touches_all() {
        let spec = Arc::new(MatroidSpec::uniform(4, 2).unwrap());
        let bounds = Bounds::new(1.0, 16.0, 1.0, 16.0).unwrap();
        let feats = vec![Feature::new(5.0, 1.5); 4];
        let mut opts = IndexOptions::new(0.9);
        opts.policy = InstancePolicy::Eager;
        let mut idx = ApproxIndex::initialize(spec, bounds, feats, opts).unwrap();
        assert!(idx.is_eager());
        let cells = idx.hitting_set().len() as u64;
        // eta = 0.3: 5.0 and 5.1 share a bin
        idx.update_feature(0, Feature::new(5.1, 1.5)).unwrap();
        assert_eq!(idx.stats().instance_updates, 0);
        idx.update_feature(0, Feature::new(12.0, 1.5)).unwrap();
        assert_eq!(idx.stats().instance_updates, cells);
        idx.audit().unwrap();
    }

    #[test]
    fn same_bin_returns_exact_optimum() {
        let spec = Arc::new(MatroidSpec::uniform(5, 2).unwrap());
        let bounds = Bounds::new(1.0, 2.0, 1.0, 2.0).unwrap();
        let feats: Vec<Feature> = (0..5).map(|i| Feature::new(1.5 + 0.01 * i as f64, 1.5)).collect();
        let mut idx = ApproxIndex::initialize(spec.clone(), bounds, feats, IndexOptions::new(0.9)).unwrap();
        let base = idx.find_base(Query::new(1.0, 1.0)).unwrap();
        assert_eq!(base.len(), 2);
    }

    #[test]
    fn w_one_instances_match_greedy() {
        let spec = Arc::new(MatroidSpec::uniform(4, 2).unwrap());
        let bounds = Bounds::new(1.0, 1.0, 2.0, 2.0).unwrap();
        let feats = vec![
            Feature::new(1.0, 2.0),
            Feature::new(0.0, 2.0),
            Feature::new(1.0, 0.0),
            Feature::new(0.0, 0.0),
        ];
        let mut idx = ApproxIndex::initialize(spec.clone(), bounds, feats, IndexOptions::new(0.5)).unwrap();
        assert_eq!(idx.w(), 1);
        assert!(idx.grid().arrangement_points().len() <= 6);
        for c in 0..idx.hitting_set().len() {
            let h = idx.hitting_set().vector(c);
            let w = idx.weights_for(h);
            let got = idx.instance_mut(c).unwrap().current_base();
            let want = greedy_max_weight_basis(&spec, &w).unwrap();
            assert!((got.weight(&w) - want.weight(&w)).abs() < 1e-12);
        }
    }

    #[test]
    fn approximation_against_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bounds = Bounds::new(0.2, 1.0, 0.05, 1.0).unwrap();
        let specs = [
            MatroidSpec::uniform(6, 3).unwrap(),
            MatroidSpec::partition(vec![0, 0, 1, 1, 1, 2]).unwrap(),
            MatroidSpec::graphical(4, vec![(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap(),
            MatroidSpec::transversal(3, vec![vec![0], vec![0, 1], vec![1, 2], vec![2], vec![0, 2]]).unwrap(),
        ];
        for (si, spec) in specs.iter().enumerate() {
            let spec = Arc::new(spec.clone());
            let k = spec.ground_size();
            let feats: Vec<Feature> = (0..k).map(|_| random_feature(&mut rng, &bounds)).collect();
            let mut opts = IndexOptions::new(0.5);
            opts.cross_check = true;
            let mut idx = ApproxIndex::initialize(spec.clone(), bounds, feats, opts).unwrap();
            for round in 0..60 {
                let q = Query::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let w: Vec<f64> = idx.features().iter().map(|f| f.dot(&q)).collect();
                let got = idx.find_base(q).unwrap().weight(&w);
                let best = best_weight(&spec, &w);
                assert!(got >= best / (1.0 + idx.epsilon()) - 1e-12, "spec {si} round {round}");
                assert!(got >= best / (1.0 + idx.eta()).powi(2) - 1e-12);
                let arm = rng.gen_range(0..k);
                idx.update_feature(arm, random_feature(&mut rng, &bounds)).unwrap();
            }
            idx.audit().unwrap();
        }
    }

    #[test]
    fn lazy_and_eager_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bounds = Bounds::new(0.1, 0.9, 0.01, 1.0).unwrap();
        let spec = Arc::new(MatroidSpec::uniform(10, 3).unwrap());
        let feats: Vec<Feature> = (0..10).map(|_| random_feature(&mut rng, &bounds)).collect();
        let coverage = Coverage::cone(0.3, 1.4).unwrap();
        let mut eager_opts = IndexOptions::new(0.6);
        eager_opts.coverage = coverage;
        eager_opts.policy = InstancePolicy::Eager;
        let mut lazy_opts = eager_opts.clone();
        lazy_opts.policy = InstancePolicy::Lazy { capacity: 2 };
        let mut eager = ApproxIndex::initialize(spec.clone(), bounds, feats.clone(), eager_opts).unwrap();
        let mut lazy = ApproxIndex::initialize(spec, bounds, feats, lazy_opts).unwrap();
        for _ in 0..200 {
            let ang: f64 = rng.gen_range(0.3..1.4);
            let q = Query::new(ang.cos(), ang.sin());
            let a = eager.find_base(q).unwrap();
            let b = lazy.find_base(q).unwrap();
            let cell_h = eager.hitting_set().vector(eager.locate(q).unwrap());
            let wh: Vec<f64> = (0..10).map(|k| dot(eager.dominating_point_of(k), cell_h)).collect();
            assert!((a.weight(&wh) - b.weight(&wh)).abs() < 1e-12);
            let arm = rng.gen_range(0..10);
            let f = random_feature(&mut rng, &bounds);
            eager.update_feature(arm, f).unwrap();
            lazy.update_feature(arm, f).unwrap();
        }
        assert!(lazy.materialized() <= 2);
        lazy.audit().unwrap();
        eager.audit().unwrap();
        assert!(lazy.locate(Query::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn scaling_query_keeps_cell_and_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bounds = Bounds::new(0.2, 1.0, 0.05, 1.0).unwrap();
        let spec = Arc::new(MatroidSpec::uniform(6, 2).unwrap());
        let feats: Vec<Feature> = (0..6).map(|_| random_feature(&mut rng, &bounds)).collect();
        let mut idx = ApproxIndex::initialize(spec, bounds, feats, IndexOptions::new(0.9)).unwrap();
        for _ in 0..100 {
            let q = Query::new(rng.gen_range(0.01..1.0), rng.gen_range(0.01..1.0));
            let c = rng.gen_range(0.001..1000.0);
            let q2 = Query::new(q.q1 * c, q.q2 * c);
            assert_eq!(idx.locate(q).unwrap(), idx.locate(q2).unwrap());
            assert_eq!(idx.find_base(q).unwrap(), idx.find_base(q2).unwrap());
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let spec = Arc::new(MatroidSpec::uniform(2, 1).unwrap());
        let bounds = Bounds::new(1.0, 2.0, 1.0, 2.0).unwrap();
        let feats = vec![Feature::new(1.0, 1.0); 2];
        assert!(ApproxIndex::initialize(spec.clone(), bounds, feats.clone(), IndexOptions::new(1.0)).is_err());
        assert!(ApproxIndex::initialize(spec.clone(), bounds, feats[..1].to_vec(), IndexOptions::new(0.5)).is_err());
        let mut idx = ApproxIndex::initialize(spec, bounds, feats, IndexOptions::new(0.5)).unwrap();
        assert!(idx.find_base(Query::new(0.0, 0.0)).is_err());
        assert!(idx.update_feature(0, Feature::new(3.0, 1.0)).is_err());
        assert!(idx.update_feature(2, Feature::new(1.0, 1.0)).is_err());
    }
}
