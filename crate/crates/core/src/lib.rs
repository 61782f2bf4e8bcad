//! Exact-arithmetic substrate for subspace-theorem style inequalities over Q:
//! places and heights, local Weil functions for divisors and closed
//! subschemes, subgeneral position of hyperplane arrangements, generic linear
//! combinations with replayable certificates, Seshadri constants for the
//! classes with closed forms, and a seeded experiment harness.

pub mod arith;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod position;
pub mod proj;
pub mod quang;
pub mod seshadri;
pub mod weil;

pub use arith::{Place, Prime, Rat};
pub use error::{Error, Result};
pub use proj::{HomForm, LinearForm, LinearSubvariety, ProjPoint};
