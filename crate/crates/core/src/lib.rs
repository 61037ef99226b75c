//! Exact convex geometry of symmetric multi-marginal Kantorovich polytopes
//! on finite state spaces.
//!
//! Everything is computed in arbitrary-precision rational arithmetic: vertex
//! enumeration of the coefficient polytope, Monge states and their polytope,
//! two-point-marginal reductions, exact LP certificates of extremality and
//! exposedness, 3-D convex-hull volumes, and the reduced transport solver.

pub mod acceptance;
pub mod exact;
pub mod measures;
pub mod monge;
pub mod polytopes;
pub mod report;
pub mod transport;

use thiserror::Error;

/// Enumeration caps. Every combinatorial loop checks its candidate count
/// against these before starting; exceeding a cap is a hard error, never a
/// silent truncation.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Cap on basis-subset candidates in vertex enumeration.
    pub basis_candidates: u64,
    /// Cap on permutation tuples in Monge-state enumeration.
    pub monge_tuples: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            basis_candidates: 50_000_000,
            monge_tuples: 100_000_000,
        }
    }
}

impl Budget {
    /// One cap for everything, as set by `--budget` on the command line.
    pub fn uniform(cap: u64) -> Self {
        Budget {
            basis_candidates: cap,
            monge_tuples: cap,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("budget exceeded: {candidates} {what} exceed the cap of {cap}")]
    Budget {
        what: &'static str,
        candidates: u128,
        cap: u64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An internal consistency check failed. Reported instead of returning a
    /// wrong result; seeing this is a bug in the library, not in the caller.
    #[error("defect: {0}")]
    Defect(String),
}

pub type Result<T> = std::result::Result<T, Error>;
