//! Measurement harness: rewrite-sequence generation, supported-rewrite
//! counting, exhaustive adversaries, a brute-force optimal-code oracle, and
//! seeded Monte Carlo estimation with order-independent aggregation.

pub mod adversary;
pub mod montecarlo;
pub mod rng;
pub mod run;
pub mod sequence;
pub mod stats;

pub use adversary::{optimal_game_value, worst_case_t};
pub use montecarlo::{
    balls_in_bins_first_full, expected_first_collision_exact, monte_carlo_expectation, SampleStats,
};
pub use run::{measure, run_sequence, Measurement, RunReport, StopReason, TraceRow};
pub use sequence::{cyclic_sequence, random_walk_sequence, SequenceSpec};

use crate::code::CodeError;
use std::fmt;

#[derive(Debug)]
pub enum HarnessError {
    /// The exhaustive adversary exceeded its explored-state cap.
    StateSpaceTooLarge {
        explored: usize,
        cap: usize,
    },
    /// The optimal-code oracle's enumeration caps were exceeded.
    CapsExceeded(String),
    Code(CodeError),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::StateSpaceTooLarge { explored, cap } => {
                write!(
                    f,
                    "state space too large: explored {explored} states (cap {cap})"
                )
            }
            HarnessError::CapsExceeded(msg) => write!(f, "oracle caps exceeded: {msg}"),
            HarnessError::Code(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<CodeError> for HarnessError {
    fn from(e: CodeError) -> Self {
        HarnessError::Code(e)
    }
}
