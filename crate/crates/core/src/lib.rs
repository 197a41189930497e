//! Exact spectral machinery for the Bolthausen-Sznitman and Kingman
//! n-coalescents on the lattice of set partitions.
//!
//! Everything that is a statement about the generators (factorizations,
//! transition probabilities at rational `x = e^{-t}`, Green's matrices,
//! hitting probabilities) is computed in exact rational arithmetic. Floating
//! point is confined to real-time queries in [`dynamics`], the brute-force
//! references in [`oracle`] and the Monte Carlo estimators in [`simulate`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel drivers live in the companion `coalspec` crate.
#![no_std]
#![deny(missing_debug_implementations)]
#![warn(missing_docs)]

extern crate alloc;

pub mod combinatorics;
pub mod dynamics;
pub mod error;
pub mod generator;
pub mod matrix;
pub mod oracle;
pub mod partition;
pub mod rrt;
pub mod simulate;
pub mod spectral;

pub use combinatorics::BigRat;
pub use error::{Error, Result};
pub use generator::{Model, RateTable, TriMatrix};
pub use matrix::RatMatrix;
pub use partition::{Block, PartitionLattice, SetPartition};
pub use rrt::IncreasingTree;
pub use spectral::{SpectralTriple, TripleReport};
