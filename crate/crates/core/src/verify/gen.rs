//! Random small matroids and weights for the check suites.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::matroid::{MatroidKind, MatroidSpec};

pub const KINDS: [MatroidKind; 4] = [
    MatroidKind::Uniform,
    MatroidKind::Partition,
    MatroidKind::Graphical,
    MatroidKind::Transversal,
];

/// A random matroid of the given class with `2..=k_max` elements.
pub fn random_spec(rng: &mut ChaCha8Rng, kind: MatroidKind, k_max: usize) -> MatroidSpec {
    let k = rng.gen_range(2..=k_max.max(2));
    match kind {
        MatroidKind::Uniform => MatroidSpec::uniform(k, rng.gen_range(1..=k)).expect("valid uniform"),
        MatroidKind::Partition => {
            let parts = rng.gen_range(1..=k);
            let mut part_of: Vec<usize> = (0..parts).collect();
            part_of.extend((parts..k).map(|_| rng.gen_range(0..parts)));
            part_of.shuffle(rng);
            MatroidSpec::partition(part_of).expect("valid partition")
        }
        MatroidKind::Graphical => loop {
            let v = rng.gen_range(2..=5);
            let edges: Vec<(usize, usize)> = (0..k).map(|_| (rng.gen_range(0..v), rng.gen_range(0..v))).collect();
            if let Ok(s) = MatroidSpec::graphical(v, edges) {
                return s;
            }
        },
        MatroidKind::Transversal => loop {
            let right = rng.gen_range(1..=k.min(4));
            let adjacency: Vec<Vec<usize>> = (0..k)
                .map(|_| (0..right).filter(|_| rng.gen_bool(0.45)).collect())
                .collect();
            if let Ok(s) = MatroidSpec::transversal(right, adjacency) {
                return s;
            }
        },
    }
}

/// Real weights, or small integers (many ties) with probability one half.
pub fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> (Vec<f64>, bool) {
    if rng.gen_bool(0.5) {
        ((0..k).map(|_| rng.gen_range(0..4) as f64).collect(), true)
    } else {
        ((0..k).map(|_| rng.gen_range(-1.0..3.0)).collect(), false)
    }
}
