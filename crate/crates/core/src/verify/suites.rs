use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::approx_index::{
    generate_hitting_set, grid_boundaries_in_cone, generate_hitting_set_in_cone, ApproxIndex, Bounds, Coverage,
    Feature, Grid, IndexOptions, Query,
};
use crate::bandit::{run_experiment, Algo, RegretTrace, RewardRange, RunConfig, Schedule};
use crate::dynamic::{dyn_init, DynamicBase};
use crate::error::{input_err, Result};
use crate::matroid::{enumerate_bases, greedy_max_weight_basis, greedy_max_weight_basis_with, Basis, MatroidSpec, TieBreak};

use super::gen::{random_spec, random_weights, KINDS};
use super::CriterionReport;

fn report(id: u8, name: &'static str, budget_s: u64, start: Instant, failures: usize, detail: String) -> CriterionReport {
    CriterionReport {
        id,
        name,
        passed: failures == 0,
        detail,
        elapsed: start.elapsed(),
        budget: Duration::from_secs(budget_s),
    }
}

fn best_weight(bases: &[Basis], w: &[f64]) -> f64 {
    bases.iter().map(|b| b.weight(w)).fold(f64::NEG_INFINITY, f64::max)
}

fn close(got: f64, want: f64) -> bool {
    (got - want).abs() <= 1e-12 * want.abs().max(1e-300) || got == want
}

/// Compares bases by their members listed best-first under (weight desc,
/// index asc); `Greater` means `a` is preferred. For equal total weights the
/// maximum is the base the ascending-index greedy returns.
fn scan_order_cmp(a: &Basis, b: &Basis, w: &[f64]) -> Ordering {
    let key = |x: &Basis| {
        let mut m = x.members().to_vec();
        m.sort_by(|&i, &j| w[j].total_cmp(&w[i]).then(i.cmp(&j)));
        m
    };
    let (ka, kb) = (key(a), key(b));
    for (&i, &j) in ka.iter().zip(&kb) {
        let ord = w[i].total_cmp(&w[j]).then(j.cmp(&i));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

pub struct GreedyParams {
    pub trials_per_class: usize,
    pub k_max: usize,
    pub seed: u64,
    pub tie: TieBreak,
}

impl GreedyParams {
    pub fn full() -> Self {
        Self {
            trials_per_class: 200,
            k_max: 8,
            seed: 11,
            tie: TieBreak::AscendingIndex,
        }
    }

    pub fn small() -> Self {
        Self {
            trials_per_class: 50,
            ..Self::full()
        }
    }
}

/// Greedy weight equals the enumerated optimum; with tied integer weights the
/// greedy base is also the canonical one.
pub fn greedy_suite(p: &GreedyParams) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (mut failures, mut canonical_checks, mut total) = (0, 0, 0);
    let mut first = None;
    for kind in KINDS {
        for trial in 0..p.trials_per_class {
            let spec = random_spec(&mut rng, kind, p.k_max);
            let (w, integral) = random_weights(&mut rng, spec.ground_size());
            let g = greedy_max_weight_basis_with(&spec, &w, p.tie)?;
            let bases = enumerate_bases(&spec)?;
            let best = best_weight(&bases, &w);
            total += 1;
            let mut ok = close(g.weight(&w), best);
            if ok && integral {
                canonical_checks += 1;
                let canonical = bases
                    .iter()
                    .filter(|b| b.weight(&w) == best)
                    .max_by(|a, b| scan_order_cmp(a, b, &w))
                    .expect("at least one base");
                ok = canonical == &g;
            }
            if !ok {
                failures += 1;
                first.get_or_insert(format!("{kind} trial {trial}: {spec} w={w:?} greedy={:?}", g.members()));
            }
        }
    }
    let detail = match first {
        None => format!("{total} instances, {canonical_checks} with ties checked for the canonical base"),
        Some(f) => format!("{failures}/{total} mismatches; first: {f}"),
    };
    Ok(report(1, "greedy", 10, start, failures, detail))
}

pub struct DynamicParams {
    pub trials_per_class: usize,
    pub updates: usize,
    pub k_max: usize,
    pub seed: u64,
}

impl DynamicParams {
    pub fn full() -> Self {
        Self {
            trials_per_class: 200,
            updates: 500,
            k_max: 12,
            seed: 12,
        }
    }

    pub fn small() -> Self {
        Self {
            trials_per_class: 20,
            updates: 200,
            ..Self::full()
        }
    }
}

/// After every single-weight update the maintained base is as heavy as a
/// fresh greedy recompute.
pub fn dynamic_suite(p: &DynamicParams) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (mut failures, mut checks) = (0usize, 0usize);
    let mut first = None;
    for kind in KINDS {
        for trial in 0..p.trials_per_class {
            let spec = std::sync::Arc::new(random_spec(&mut rng, kind, p.k_max));
            let k = spec.ground_size();
            let (w, _) = random_weights(&mut rng, k);
            let mut inst = dyn_init(spec.clone(), w)?;
            for step in 0..p.updates {
                let arm = rng.gen_range(0..k);
                let nw = if rng.gen_bool(0.3) { rng.gen_range(0..4) as f64 } else { rng.gen_range(-1.0..3.0) };
                inst.update_weight(arm, nw)?;
                let weights = inst.weights().to_vec();
                let got = inst.current_base().weight(&weights);
                let want = greedy_max_weight_basis(&spec, &weights)?.weight(&weights);
                checks += 1;
                if !close(got, want) {
                    failures += 1;
                    first.get_or_insert(format!("{kind} trial {trial} step {step}: {got} vs {want}"));
                }
                if step % 50 == 49 {
                    inst.audit()?;
                }
            }
        }
    }
    let detail = match first {
        None => format!("{checks} updates matched greedy recompute"),
        Some(f) => format!("{failures}/{checks} mismatches; first: {f}"),
    };
    Ok(report(2, "dynamic", 60, start, failures, detail))
}

pub struct RoundingParams {
    pub samples: usize,
    pub seed: u64,
}

impl RoundingParams {
    pub fn full() -> Self {
        Self {
            samples: 100_000,
            seed: 13,
        }
    }

    pub fn small() -> Self {
        Self {
            samples: 20_000,
            ..Self::full()
        }
    }
}

fn random_coordinate(rng: &mut ChaCha8Rng, grid_edges: &[f64], lb: f64, ub: f64) -> f64 {
    match rng.gen_range(0..10) {
        0 => 0.0,
        1 => ub,
        // a bin's right edge, which belongs to that bin
        2 => {
            let e = grid_edges[rng.gen_range(1..grid_edges.len())];
            if e <= ub {
                e
            } else {
                ub
            }
        }
        _ => lb + (ub - lb) * rng.gen::<f64>(),
    }
}

/// `<dom(f),q>/(1+eta) <= <f,q> <= <dom(f),q>`, strict on the left whenever
/// the dominating weight is positive.
pub fn rounding_suite(p: &RoundingParams) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (mut failures, mut strict_checks) = (0usize, 0usize);
    let mut first = None;
    let per_grid = 1000;
    let mut done = 0;
    while done < p.samples {
        let alpha_lb = rng.gen_range(0.01..1.0);
        let beta_lb = rng.gen_range(0.001..1.0);
        let bounds = Bounds::new(
            alpha_lb,
            alpha_lb * rng.gen_range(1.0..50.0),
            beta_lb,
            beta_lb * rng.gen_range(1.0..200.0),
        )?;
        let eta = rng.gen_range(0.01..0.99);
        let grid = Grid::new(bounds, eta)?;
        let a_edges: Vec<f64> = (0..=grid.w()).map(|i| grid.alpha_edge(i)).collect();
        let b_edges: Vec<f64> = (0..=grid.w()).map(|i| grid.beta_edge(i)).collect();
        for _ in 0..per_grid.min(p.samples - done) {
            done += 1;
            let f = Feature::new(
                random_coordinate(&mut rng, &a_edges, bounds.alpha_lb, bounds.alpha_ub),
                random_coordinate(&mut rng, &b_edges, bounds.beta_lb, bounds.beta_ub),
            );
            let q = match rng.gen_range(0..10) {
                0 => Query::new(rng.gen::<f64>(), 0.0),
                1 => Query::new(0.0, rng.gen::<f64>()),
                _ => Query::new(rng.gen::<f64>(), rng.gen::<f64>()),
            };
            let dom = grid.dominating_point(grid.bin_of(&f)?);
            let dq = dom[0] * q.q1 + dom[1] * q.q2;
            let fq = f.dot(&q);
            let lower = dq / (1.0 + eta);
            let tol = 1e-12 * dq.abs();
            let ok = if dq > 0.0 {
                strict_checks += 1;
                lower < fq && fq <= dq + tol
            } else {
                lower <= fq && fq <= dq
            };
            if !ok {
                failures += 1;
                first.get_or_insert(format!("f=({}, {}) q=({}, {}) eta={eta}: {lower} / {fq} / {dq}", f.alpha, f.beta, q.q1, q.q2));
            }
        }
    }
    let detail = match first {
        None => format!("{done} pairs, {strict_checks} with strict lower bound"),
        Some(f) => format!("{failures}/{done} violations; first: {f}"),
    };
    Ok(report(3, "rounding", 5, start, failures, detail))
}

pub struct FindBaseParams {
    pub instances: usize,
    pub queries_per_instance: usize,
    pub k_max: usize,
    pub epsilons: Vec<f64>,
    pub seed: u64,
}

impl FindBaseParams {
    pub fn full() -> Self {
        Self {
            instances: 100,
            queries_per_instance: 20,
            k_max: 8,
            epsilons: vec![0.1, 0.5, 0.9],
            seed: 14,
        }
    }

    pub fn small() -> Self {
        Self {
            instances: 24,
            queries_per_instance: 10,
            ..Self::full()
        }
    }
}

fn random_feature(rng: &mut ChaCha8Rng, b: &Bounds) -> Feature {
    let coord = |rng: &mut ChaCha8Rng, lb: f64, ub: f64| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(lb..=ub) };
    Feature::new(coord(rng, b.alpha_lb, b.alpha_ub), coord(rng, b.beta_lb, b.beta_ub))
}

/// Find-Base returns a `(1+epsilon)`-approximate base under the true features,
/// before and after feature updates.
pub fn findbase_suite(p: &FindBaseParams) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (mut failures, mut checks) = (0usize, 0usize);
    let mut worst = f64::INFINITY;
    let mut first = None;
    for i in 0..p.instances {
        let kind = KINDS[i % KINDS.len()];
        let eps = p.epsilons[i % p.epsilons.len()];
        let spec = std::sync::Arc::new(random_spec(&mut rng, kind, p.k_max));
        let k = spec.ground_size();
        let a_lb = rng.gen_range(0.05..0.5);
        let b_lb = rng.gen_range(0.01..0.5);
        let bounds = Bounds::new(a_lb, a_lb * rng.gen_range(1.0..4.0), b_lb, b_lb * rng.gen_range(1.0..8.0))?;
        let features: Vec<Feature> = (0..k).map(|_| random_feature(&mut rng, &bounds)).collect();
        let mut opts = IndexOptions::new(eps);
        opts.coverage = Coverage::cone(0.0, FRAC_PI_2)?;
        opts.cross_check = true;
        let mut index = ApproxIndex::initialize(spec.clone(), bounds, features, opts)?;
        let bases = enumerate_bases(&spec)?;
        for _ in 0..p.queries_per_instance {
            let q = match rng.gen_range(0..8) {
                0 => Query::new(1.0, 0.0),
                1 => Query::new(0.0, 1.0),
                _ => Query::new(rng.gen::<f64>(), rng.gen::<f64>()),
            };
            let w: Vec<f64> = index.features().iter().map(|f| f.dot(&q)).collect();
            let got = index.find_base(q)?.weight(&w);
            let best = best_weight(&bases, &w);
            checks += 1;
            if best > 0.0 {
                worst = worst.min(got / best);
            }
            if got < best / (1.0 + eps) - 1e-12 * best.abs() {
                failures += 1;
                first.get_or_insert(format!("instance {i} ({kind}, eps {eps}): {got} < {best}/(1+eps)"));
            }
            let arm = rng.gen_range(0..k);
            index.update_feature(arm, random_feature(&mut rng, &bounds))?;
        }
        index.audit()?;
    }
    let detail = match first {
        None => format!("{checks} queries over {} instances, worst ratio {worst:.4}", p.instances),
        Some(f) => format!("{failures}/{checks} below the guarantee; first: {f}"),
    };
    Ok(report(4, "findbase", 60, start, failures, detail))
}

pub struct CoveringParams {
    pub sizes: Vec<usize>,
    pub queries: usize,
    pub seed: u64,
}

impl CoveringParams {
    pub fn full() -> Self {
        Self {
            sizes: vec![2, 5, 20],
            queries: 10_000,
            seed: 15,
        }
    }

    pub fn small() -> Self {
        Self {
            queries: 2_000,
            ..Self::full()
        }
    }
}

fn dot(p: [f64; 2], q: [f64; 2]) -> f64 {
    p[0] * q[0] + p[1] * q[1]
}

fn random_quadrant_query(rng: &mut ChaCha8Rng) -> [f64; 2] {
    loop {
        let q = [rng.gen::<f64>(), rng.gen::<f64>()];
        if q[0] > 0.0 || q[1] > 0.0 {
            return q;
        }
    }
}

/// The located cell never strictly orders two points against the query;
/// includes the scaled-copy variant on a rounding grid and the realization of
/// every query ordering on four points.
pub fn covering_suite(p: &CoveringParams) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (mut failures, mut checks) = (0usize, 0usize);
    let mut first = None;
    let tol = 1e-12;
    for &n in &p.sizes {
        let points: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let hs = generate_hitting_set(&points)?;
        for _ in 0..p.queries {
            let q = random_quadrant_query(&mut rng);
            let h = hs.vector(hs.locate(q)?);
            for a in &points {
                for b in &points {
                    checks += 1;
                    if dot(*a, h) > dot(*b, h) && dot(*a, q) < dot(*b, q) - tol {
                        failures += 1;
                        first.get_or_insert(format!("n={n}: q={q:?} h={h:?} a={a:?} b={b:?}"));
                    }
                }
            }
        }
    }

    // scaled copies: <d,h> > <d',h>/(1+eta) implies <d,q> >= <d',q>/(1+eta)
    let grid = Grid::new(Bounds::new(0.2, 0.9, 0.05, 1.0)?, 0.3)?;
    let eta = grid.eta();
    let hs = generate_hitting_set(&grid.arrangement_points())?;
    let doms: Vec<[f64; 2]> = grid
        .bins()
        .filter(|b| b.q.is_some() || b.r.is_some())
        .map(|b| grid.dominating_point(b))
        .collect();
    let mut scaled_checks = 0usize;
    for _ in 0..p.queries / 10 {
        let q = random_quadrant_query(&mut rng);
        let h = hs.vector(hs.locate(q)?);
        for d in &doms {
            for e in &doms {
                scaled_checks += 1;
                if dot(*d, h) > dot(*e, h) / (1.0 + eta) && dot(*d, q) < dot(*e, q) / (1.0 + eta) - tol {
                    failures += 1;
                    first.get_or_insert(format!("scaled: q={q:?} d={d:?} d'={e:?}"));
                }
            }
        }
    }

    // every strict ordering of four points seen from the quadrant is some cell's
    let mut realized = 0usize;
    for _ in 0..50 {
        let points: Vec<[f64; 2]> = (0..4).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let hs = generate_hitting_set(&points)?;
        let order = |v: [f64; 2]| {
            let mut idx: Vec<usize> = (0..4).collect();
            idx.sort_by(|&i, &j| dot(points[j], v).total_cmp(&dot(points[i], v)));
            idx
        };
        let cell_orders: Vec<Vec<usize>> = hs.vectors().iter().map(|&h| order(h)).collect();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..p.queries / 50 {
            let q = random_quadrant_query(&mut rng);
            let ord = order(q);
            let strict = ord.windows(2).all(|w| dot(points[w[0]], q) > dot(points[w[1]], q) + 1e-9);
            if strict && seen.insert(ord.clone()) && !cell_orders.contains(&ord) {
                failures += 1;
                first.get_or_insert(format!("ordering {ord:?} of {points:?} has no cell"));
            }
        }
        realized += seen.len();
    }
    let detail = match first {
        None => format!(
            "{checks} pair checks, {scaled_checks} scaled-copy checks, {realized} query orderings realized"
        ),
        Some(f) => format!("{failures} violations; first: {f}"),
    };
    Ok(report(5, "covering", 10, start, failures, detail))
}

pub struct ArrangementParams {
    pub ws: Vec<u32>,
}

impl ArrangementParams {
    pub fn full() -> Self {
        Self { ws: vec![1, 2, 4, 8] }
    }

    pub fn small() -> Self {
        Self::full()
    }
}

/// `|H| <= 2*C(n,2) + 2` for the rounding grid's point set at several `W`.
pub fn arrangement_suite(p: &ArrangementParams) -> Result<CriterionReport> {
    let start = Instant::now();
    let eta: f64 = 0.5;
    let mut failures = 0;
    let mut parts = Vec::new();
    for &w in &p.ws {
        let ratio = (1.0 + eta).powi(w as i32);
        let grid = Grid::new(Bounds::new(1.0, ratio, 0.5, 0.5 * ratio)?, eta)?;
        if grid.w() != w {
            return Err(input_err!("grid for W={w} came out with W={}", grid.w()));
        }
        let pts = grid.arrangement_points();
        let n = pts.len();
        let hs = generate_hitting_set(&pts)?;
        let limit = n * (n - 1) + 2;
        let rays = hs.boundary_angles().len();
        let cells_match = hs.len() == rays.max(1);
        // the structured enumerator agrees with all pairs on the quadrant
        let slow = generate_hitting_set_in_cone(&pts, 0.0, FRAC_PI_2)?;
        let fast = grid_boundaries_in_cone(&grid, 0.0, FRAC_PI_2)?;
        let same = slow.boundary_angles().len() == fast.boundary_angles().len()
            && slow.boundary_angles().iter().zip(fast.boundary_angles()).all(|(a, b)| (a - b).abs() < 1e-11);
        if hs.len() > limit || !cells_match || !same {
            failures += 1;
        }
        parts.push(format!("W={w}: n={n} |H|={} limit={limit}{}", hs.len(), if same { "" } else { " (enumerators differ)" }));
    }
    Ok(report(6, "arrangement", 5, start, failures, parts.join("; ")))
}

pub struct RegretParams {
    pub means: Vec<f64>,
    pub d: usize,
    pub a: f64,
    pub b: f64,
    pub horizon: u64,
    pub m: u32,
    pub seeds: u64,
    pub max_ratio_to_cucb: f64,
}

impl RegretParams {
    pub fn full() -> Self {
        Self {
            means: vec![0.8, 0.7, 0.5, 0.45, 0.4, 0.35, 0.3, 0.2],
            d: 2,
            a: 0.1,
            b: 0.9,
            horizon: 100_000,
            m: 1,
            seeds: 20,
            max_ratio_to_cucb: 3.0,
        }
    }

    pub fn small() -> Self {
        Self {
            horizon: 20_000,
            seeds: 5,
            ..Self::full()
        }
    }
}

fn run_seeds(base: &RunConfig, seeds: u64) -> Result<Vec<RegretTrace>> {
    (0..seeds)
        .into_par_iter()
        .map(|s| {
            let mut c = base.clone();
            c.seed = s;
            run_experiment(&c)
        })
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean FasterCUCB regret stays under the finite-horizon bound and within a
/// constant factor of CUCB on the same seeds.
pub fn regret_suite(p: &RegretParams) -> Result<CriterionReport> {
    let start = Instant::now();
    let range = RewardRange::new(p.a, p.b)?;
    let spec = MatroidSpec::uniform(p.means.len(), p.d)?;
    let mut faster = RunConfig::two_point(spec.clone(), Algo::FasterCucb, p.horizon, range, &p.means, 0)?;
    faster.m = p.m;
    faster.hitting_set = faster.shared_hitting_set()?;
    let mut cucb = RunConfig::two_point(spec, Algo::Cucb, p.horizon, range, &p.means, 0)?;
    cucb.m = p.m;
    let ft = run_seeds(&faster, p.seeds)?;
    let ct = run_seeds(&cucb, p.seeds)?;
    let fr: Vec<f64> = ft.iter().map(|t| t.final_regret()).collect();
    let cr: Vec<f64> = ct.iter().map(|t| t.final_regret()).collect();
    let (fm, cm) = (mean(&fr), mean(&cr));
    let bound = ft[0].theorem_bound;
    let bounds_ok = ft.iter().all(|t| t.bounds_respected);
    let ok_bound = fm <= bound;
    let ok_ratio = fm <= p.max_ratio_to_cucb * cm;
    let failures = [ok_bound, ok_ratio, bounds_ok].iter().filter(|x| !**x).count();
    let detail = format!(
        "mean regret fastercucb {fm:.1} vs bound {bound:.1} ({}), cucb {cm:.1} ratio {:.2} ({}), feature bounds {}; T0 {:.1}, cells {}",
        if ok_bound { "ok" } else { "exceeded" },
        fm / cm,
        if ok_ratio { "ok" } else { "exceeded" },
        if bounds_ok { "held" } else { "violated" },
        ft[0].t0,
        ft[0].diagnostics.hitting_set_size.unwrap_or(0),
    );
    Ok(report(7, "regret", 300, start, failures, detail))
}

pub struct ScalingParams {
    pub ks: Vec<usize>,
    pub d: usize,
    pub horizon: u64,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub faster_max_ratio: f64,
    pub cucb_min_ratio: f64,
}

impl ScalingParams {
    pub fn full() -> Self {
        Self {
            ks: vec![1 << 10, 1 << 12, 1 << 14, 1 << 16],
            d: 8,
            horizon: 20_000,
            epsilon: Some(0.9),
            seed: 1,
            faster_max_ratio: 2.0,
            cucb_min_ratio: 3.0,
        }
    }

    pub fn small() -> Self {
        Self {
            ks: vec![1 << 8, 1 << 10, 1 << 12],
            horizon: 5_000,
            ..Self::full()
        }
    }
}

/// One scaling measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub k: usize,
    pub algo: Algo,
    pub mean_ns: f64,
    pub p50_ns: u64,
    pub p99_ns: u64,
    pub ops_per_round: f64,
}

/// Runs CUCB and FasterCUCB on `uniform K D` with linearly spaced means for
/// every `K`, one run at a time so the timings do not interfere.
pub fn scaling_points(p: &ScalingParams) -> Result<Vec<ScalingPoint>> {
    let range = RewardRange::new(0.1, 0.9)?;
    let mut out = Vec::new();
    for &k in &p.ks {
        let means: Vec<f64> = (0..k).map(|i| 0.85 - 0.7 * i as f64 / (k.max(2) - 1) as f64).collect();
        for algo in [Algo::Cucb, Algo::FasterCucb] {
            let spec = MatroidSpec::uniform(k, p.d)?;
            let mut c = RunConfig::two_point(spec, algo, p.horizon, range, &means, p.seed)?;
            c.epsilon = p.epsilon;
            let tr = run_experiment(&c)?;
            let t = tr.timing();
            let rounds = (tr.horizon - tr.init_rounds).max(1) as f64;
            out.push(ScalingPoint {
                k,
                algo,
                mean_ns: t.mean_ns,
                p50_ns: t.p50_ns,
                p99_ns: t.p99_ns,
                ops_per_round: tr.diagnostics.op_count as f64 / rounds,
            });
        }
    }
    Ok(out)
}

/// FasterCUCB's mean round time grows by at most `faster_max_ratio` per step
/// of the `K` list while CUCB's grows by at least `cucb_min_ratio` on the last.
pub fn scaling_suite(p: &ScalingParams) -> Result<CriterionReport> {
    let start = Instant::now();
    let pts = scaling_points(p)?;
    let series = |algo: Algo| -> Vec<f64> { pts.iter().filter(|x| x.algo == algo).map(|x| x.mean_ns).collect() };
    let ratios = |v: &[f64]| -> Vec<f64> { v.windows(2).map(|w| w[1] / w[0]).collect() };
    let (fs, cs) = (series(Algo::FasterCucb), series(Algo::Cucb));
    let (fr, cr) = (ratios(&fs), ratios(&cs));
    let faster_ok = fr.iter().all(|&r| r <= p.faster_max_ratio);
    let cucb_ok = cr.last().is_some_and(|&r| r >= p.cucb_min_ratio);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ");
    let detail = format!(
        "mean ns fastercucb [{}] ratios [{}] ({}), cucb [{}] ratios [{}] ({})",
        fs.iter().map(|x| format!("{x:.0}")).collect::<Vec<_>>().join(", "),
        fmt(&fr),
        if faster_ok { "ok" } else { "above limit" },
        cs.iter().map(|x| format!("{x:.0}")).collect::<Vec<_>>().join(", "),
        fmt(&cr),
        if cucb_ok { "ok" } else { "below limit" },
    );
    let failures = [faster_ok, cucb_ok].iter().filter(|x| !**x).count();
    Ok(report(8, "scaling", 600, start, failures, detail))
}

pub struct LazyHeapParams {
    pub k: usize,
    pub d: usize,
    pub horizon: u64,
    pub schedule: Schedule,
    pub expected_rebuilds: u64,
    pub sampled_rounds: usize,
    pub seed: u64,
}

impl LazyHeapParams {
    pub fn full() -> Self {
        Self {
            k: 64,
            d: 4,
            horizon: 1 << 14,
            schedule: Schedule::Pow2,
            expected_rebuilds: 14,
            sampled_rounds: 100,
            seed: 19,
        }
    }

    pub fn small() -> Self {
        Self::full()
    }
}

/// Rebuild count matches the schedule and sampled rounds keep the
/// `sqrt(ln t_now / ln t)` approximation.
pub fn lazyheap_suite(p: &LazyHeapParams) -> Result<CriterionReport> {
    let start = Instant::now();
    let range = RewardRange::new(0.1, 0.9)?;
    let means: Vec<f64> = (0..p.k).map(|i| 0.85 - 0.7 * i as f64 / (p.k.max(2) - 1) as f64).collect();
    let spec = MatroidSpec::uniform(p.k, p.d)?;
    let mut c = RunConfig::two_point(spec, Algo::LazyHeap, p.horizon, range, &means, p.seed)?;
    c.schedule = p.schedule;
    let first = p.k.div_ceil(p.d) as u64 + 1;
    let span = (p.horizon - first + 1) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    c.heap_audit_rounds = sample(&mut rng, span, p.sampled_rounds.min(span))
        .into_iter()
        .map(|i| first + i as u64)
        .collect();
    let tr = run_experiment(&c)?;
    let rebuilds = tr.diagnostics.heap_rebuilds.unwrap_or(0);
    let checks = tr.heap_checks();
    let mut worst = f64::INFINITY;
    let mut bad = 0;
    for h in checks {
        let need = h.factor() * h.exact_total;
        let tol = 1e-12 * h.exact_total.abs();
        if h.heap_key_total < need - tol || h.selected_total < need - tol {
            bad += 1;
        }
        worst = worst.min(h.selected_total / h.exact_total);
    }
    let ops_per_round = tr.diagnostics.op_count as f64 / p.horizon as f64;
    let failures = usize::from(rebuilds != p.expected_rebuilds)
        + usize::from(checks.len() != p.sampled_rounds)
        + bad;
    let detail = format!(
        "{rebuilds} rebuilds (want {}), {} sampled rounds, {bad} below the factor, worst selected/exact {worst:.4}, {ops_per_round:.1} heap ops/round",
        p.expected_rebuilds,
        checks.len()
    );
    Ok(report(9, "lazyheap", 30, start, failures, detail))
}

pub struct GrowthParams {
    pub means: [f64; 2],
    pub a: f64,
    pub b: f64,
    pub horizon: u64,
    pub seeds: u64,
    pub safety: f64,
}

impl GrowthParams {
    pub fn full() -> Self {
        Self {
            means: [0.65, 0.35],
            a: 0.1,
            b: 0.9,
            horizon: 100_000,
            seeds: 20,
            safety: 1.5,
        }
    }

    pub fn small() -> Self {
        Self {
            horizon: 20_000,
            seeds: 5,
            ..Self::full()
        }
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Suboptimal pulls grow logarithmically and stay under the explicit
/// `24 (b-a)^2 ln T / gap^2` envelope.
pub fn growth_suite(p: &GrowthParams) -> Result<CriterionReport> {
    let start = Instant::now();
    let range = RewardRange::new(p.a, p.b)?;
    let spec = MatroidSpec::uniform(2, 1)?;
    let mut c = RunConfig::two_point(spec, Algo::FasterCucb, p.horizon, range, &p.means, 0)?;
    c.hitting_set = c.shared_hitting_set()?;
    let traces = run_seeds(&c, p.seeds)?;
    // log-spaced checkpoints from t = 100 to T
    let checkpoints: Vec<u64> = (0..40)
        .map(|i| (100.0 * (p.horizon as f64 / 100.0).powf(i as f64 / 39.0)).round() as u64)
        .collect();
    let x: Vec<f64> = checkpoints.iter().map(|&t| (t as f64).ln()).collect();
    let y: Vec<f64> = checkpoints
        .iter()
        .map(|&t| mean(&traces.iter().map(|tr| tr.suboptimal_pulls[t as usize - 1] as f64).collect::<Vec<_>>()))
        .collect();
    let slope = fitted_slope(&x, &y);
    let final_mean = *y.last().expect("checkpoints");
    let gap = p.means[0] - p.means[1];
    let log_t = (p.horizon as f64).ln();
    let limit = 24.0 * range.width().powi(2) * log_t / gap.powi(2) * (1.0 + 1.0 / log_t).powi(2) * p.safety;
    let slope_ok = slope.is_finite() && slope >= 0.0;
    let bound_ok = final_mean <= limit;
    let failures = usize::from(!slope_ok) + usize::from(!bound_ok);
    let detail = format!("mean N_sub(T) {final_mean:.1} vs limit {limit:.1}, slope vs ln t {slope:.2}");
    Ok(report(10, "growth", 120, start, failures, detail))
}

/// Options for [`run_suite`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOptions {
    pub full: bool,
    pub tie: TieBreak,
}

/// Runs one named suite with small or full parameters.
pub fn run_suite(name: &str, opts: SuiteOptions) -> Result<CriterionReport> {
    let full = opts.full;
    macro_rules! pick {
        ($t:ty) => {
            if full {
                <$t>::full()
            } else {
                <$t>::small()
            }
        };
    }
    match name {
        "greedy" => {
            let mut p = pick!(GreedyParams);
            p.tie = opts.tie;
            greedy_suite(&p)
        }
        "dynamic" => dynamic_suite(&pick!(DynamicParams)),
        "rounding" => rounding_suite(&pick!(RoundingParams)),
        "findbase" => findbase_suite(&pick!(FindBaseParams)),
        "covering" => covering_suite(&pick!(CoveringParams)),
        "arrangement" => arrangement_suite(&pick!(ArrangementParams)),
        "regret" => regret_suite(&pick!(RegretParams)),
        "scaling" => scaling_suite(&pick!(ScalingParams)),
        "lazyheap" => lazyheap_suite(&pick!(LazyHeapParams)),
        "growth" => growth_suite(&pick!(GrowthParams)),
        other => Err(input_err!("unknown suite '{other}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let x = [1.0, 2.0, 3.0];
        assert!((fitted_slope(&x, &[3.0, 5.0, 7.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tie_break_fault_is_caught() {
        let mut p = GreedyParams::small();
        p.trials_per_class = 30;
        assert!(greedy_suite(&p).unwrap().passed);
        p.tie = TieBreak::DescendingIndex;
        assert!(!greedy_suite(&p).unwrap().passed);
    }

    #[test]
    fn quick_suites_pass() {
        for name in ["rounding", "arrangement"] {
            let r = run_suite(name, SuiteOptions::default()).unwrap();
            assert!(r.passed, "{r}");
        }
    }
}
