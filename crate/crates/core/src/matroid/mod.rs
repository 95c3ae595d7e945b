//! Matroids, incremental membership oracles and the greedy maximum-weight basis.

mod basis;
mod greedy;
mod membership;
mod spec;
mod union_find;

pub use basis::Basis;
pub use greedy::{
    canonical_cmp, enumerate_bases, greedy_in_order, greedy_max_weight_basis,
    greedy_max_weight_basis_with, greedy_with_forced_first, weight_order, TieBreak,
    ENUMERATION_LIMIT,
};
pub use membership::Membership;
pub use spec::{MatroidKind, MatroidSpec, Structure};
pub use union_find::UnionFind;
