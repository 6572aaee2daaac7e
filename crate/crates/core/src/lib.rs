//! Exact F_p computations for the Hochschild, prismatic and syntomic
//! cohomology of connective Morava K-theory k(n), modulo the ideal
//! (p, v_1, ..., v_{n+1}), together with chart output.
//!
//! Every closed formula in [`hochschild`] and [`syntomic`] is paired with an
//! independent linear-algebra computation, and the two are compared.

pub mod assembly;
pub mod bigraded;
pub mod chart;
pub mod error;
pub mod gfp;
pub mod hochschild;
pub mod ss_engine;
pub mod syntomic;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
