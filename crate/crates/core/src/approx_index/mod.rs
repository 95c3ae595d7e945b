//! Approximate dynamic index for 2-D features.
//!
//! Arm `k` carries a feature `f_k = (alpha_k, beta_k)` and a query `q` asks for
//! a maximum-weight base under weights `<f_k, q>`. Features are rounded up to
//! the corner of a geometric bin, and one exact dynamic base is kept per cell
//! of the line arrangement induced by the bin corners. Any query then reduces
//! to a lookup in the instance of the cell that contains it.

mod hitting_set;
mod index;
mod rounding;

pub use hitting_set::{
    generate_hitting_set, generate_hitting_set_in_cone, grid_boundaries_in_cone, Coverage,
    HittingSet, ANGLE_DEDUP_TOL,
};
pub use index::{ApproxIndex, IndexOptions, IndexStats, InstancePolicy, EAGER_CELL_LIMIT, EAGER_SLOT_LIMIT};
pub use rounding::{compute_w, BinIndex, Bounds, Feature, Grid, Query};
