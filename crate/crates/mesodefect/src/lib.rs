//! Std companion to `mesodefect-core`: JSON run configuration, CSV field
//! sampling, the periodic spectral decomposition, and the verification
//! report machinery behind the `mesodefect` binary.

pub mod config;
pub mod grid;
pub mod report;
pub mod sample;
pub mod verify;
