//! Matroid semi-bandits with sublinear per-round cost.
//!
//! The crate is layered bottom-up:
//!
//! - [`matroid`]: matroid descriptions, incremental membership oracles and the
//!   greedy maximum-weight basis.
//! - [`dynamic`]: per-class structures that keep a maximum-weight base under
//!   single-arm weight changes.
//! - [`approx_index`]: rounds 2-D arm features onto a geometric grid and keeps
//!   one dynamic base per cell of the induced line arrangement, so that a
//!   (1+ε)-approximate base for any query direction is a lookup.
//! - [`bandit`]: environments, the CUCB / FasterCUCB / lazy-heap agents and
//!   regret bookkeeping.
//! - [`cli`]: configuration, experiment commands and CSV output.
//! - [`verify`]: the randomized check suites behind `mbandit verify`.

pub mod approx_index;
pub mod bandit;
pub mod cli;
pub mod dynamic;
pub mod error;
pub mod matroid;
pub mod verify;

pub use error::{Error, Result};
