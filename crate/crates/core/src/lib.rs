//! Exact algebra for Heisenberg-type lifting problems.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is finite:
//! fixed-precision p-adic integers, matrices over `Z/p^k`, and toy
//! operator modules standing in for (phi, Gamma)-modules.

#![no_std]

extern crate alloc;

pub mod atlas;
pub mod cochain;
pub mod delta;
pub mod dvr;
pub mod error;
pub mod heisenberg;
pub mod nilpotent;
pub mod padic;
pub mod zmod;

pub use error::{Error, Result};
