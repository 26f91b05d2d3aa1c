//! Multi-norms on tuples of vectors in finite `L^r` spaces.
//!
//! The crate evaluates weak `p`-summing norms, the weak, standard and dual
//! `(p,q)` multi-norms with certified brackets, multi-bounded norms of
//! operators, and the Følner-type and module-theoretic quantities that link
//! these norms to amenability of discrete groups.

pub mod amenability;
pub mod config;
pub mod error;
pub mod gmodules;
pub mod groups;
pub mod multinorm;
pub mod operators;
pub mod result;
pub mod spaces;
pub mod weaksum;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use result::{Method, NormResult, Witness};
pub use spaces::{DiscreteSpace, Exponent, MultiVector, Vector};
