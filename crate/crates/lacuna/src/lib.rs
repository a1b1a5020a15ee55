//! Exact census of discriminant-complement components, integer monodromy
//! models and numerical volume probes for the boundary singularity classes
//! B_k, C_k and F_4 in two variables.

pub mod algebra;
pub mod atlas;
pub mod cli;
pub mod curvetopo;
pub mod families;
pub mod monodromy;
pub mod volume;

pub use algebra::{Poly, Rat};
