//! Command-line front end, output formats, parallel Monte Carlo drivers and
//! the verification suite for [`coalspec_core`].

pub mod cli;
pub mod format;
pub mod parallel;
pub mod verify;
