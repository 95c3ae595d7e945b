//! Semi-bandit environments, agents and regret accounting.

mod agent;
mod arms;
mod estimates;
mod experiment;
mod faster;
mod init;
mod lazy_heap;
mod regret;

pub use agent::{Agent, Cucb, Diagnostics, HeapCheck};
pub use arms::{ArmModel, Environment, RewardRange};
pub use estimates::{lambda, ucb_index, Estimates, MeanUpdate};
pub use experiment::{run_experiment, Algo, RegretTrace, RunConfig, TimingSummary, TIMING_WARMUP};
pub use faster::{default_epsilon, FasterCucb, FasterOptions, QueryRange};
pub use init::{init_plan, InitMode};
pub use lazy_heap::{LazyHeap, Schedule};
pub use regret::{oracle_best_action, GapDecomposition};
