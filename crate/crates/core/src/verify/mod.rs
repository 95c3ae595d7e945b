//! Randomized check suites, shared by `mbandit verify` and the acceptance tests.
//!
//! Every suite takes explicit parameters (`small()` for a quick run, `full()`
//! for the acceptance thresholds) and returns a [`CriterionReport`].

mod gen;
mod suites;

use std::fmt;
use std::time::Duration;

pub use gen::{random_spec, random_weights, KINDS};
pub use suites::*;

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    /// Wall-clock budget for the suite at full parameters.
    pub budget: Duration,
}

impl CriterionReport {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<12} {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Suite names in criterion order.
pub const SUITES: [&str; 10] = [
    "greedy",
    "dynamic",
    "rounding",
    "findbase",
    "covering",
    "arrangement",
    "regret",
    "scaling",
    "lazyheap",
    "growth",
];
