//! Singular elastic fields of straight defect lines (dislocations and
//! disclinations parallel to z) and numerical verification of their
//! distributional invariants: Weingarten jumps, concentrated incompatibility,
//! contortion, strain decomposition and Stokes-type loop identities.
//!
//! The crate is `no_std` + `alloc`; everything with IO lives in the
//! companion `mesodefect` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod decomp;
pub mod dist;
pub mod fields;
pub mod math;
pub mod model;
pub mod multival;
pub mod pairing;
pub mod quad;
