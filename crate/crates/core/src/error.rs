//! Error type shared by every module of the crate.

use alloc::string::String;
use num_bigint::BigUint;

/// Errors raised by partition, matrix and simulation routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A full-lattice (or factorial-size) operation was requested past its cap.
    #[error("size {n} exceeds the cap of {cap} ({count} objects)")]
    SizeLimit {
        /// Requested size.
        n: usize,
        /// Configured cap.
        cap: usize,
        /// Number of objects the request would have produced.
        count: BigUint,
    },
    /// Two partitions (or a partition and a set) live on different ground sets.
    #[error("partitions are over different ground sets")]
    GroundMismatch,
    /// `pi <= rho` was required but does not hold.
    #[error("{0} is not a refinement of {1}")]
    NotRefinement(String, String),
    /// A rate `lambda_{b,k}` needed by the generator is absent from the table.
    #[error("rate table has no entry for lambda_({b},{k})")]
    MissingRate {
        /// Current number of blocks.
        b: usize,
        /// Number of merging blocks.
        k: usize,
    },
    /// Any other violated precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
