//! Relativistic scattering and bound states of a Dirac particle in a
//! PT-symmetric square well in (1+1) dimensions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod io;
pub mod limits;
pub mod matching;
pub mod potential;
pub mod scattering;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use potential::{PotentialSpec, Region};
