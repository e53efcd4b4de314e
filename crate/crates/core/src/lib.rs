//! Graph-complex calculus on polyvector fields.
//!
//! The crate enumerates decorated graphs, builds the free operads of corollas with their
//! boundary differentials, evaluates graph operators on exact polyvector fields, and
//! integrates propagator forms over configuration spaces of points to obtain graph
//! weights. The `theory` module assembles weights and operators into homotopy Lie
//! structures and their automorphisms.

#![forbid(unsafe_code)]

pub mod error;
pub mod faceoperad;
pub mod graphs;
pub mod integrator;
pub mod numbers;
pub mod polyfields;
pub mod propagators;
pub mod theory;

pub use error::{Error, Result};
