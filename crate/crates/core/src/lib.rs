//! Exact classification of Butson-type complex Hadamard matrices `BH(n,q)`.
//!
//! Matrices are handled in logarithmic form over `Z_q`. The search generates
//! one canonical representative per monomial equivalence class by orderly
//! generation; the remaining modules analyse the representatives.

pub mod analysis;
pub mod arith;
pub mod canonical;
pub mod catalog;
pub mod clique;
pub mod equivalence;
mod error;
pub mod extend;
pub mod format;
pub mod matrix;
pub mod norm;
pub mod search;
pub mod vanishing;

pub use error::{Error, Result};
pub use matrix::{LogMatrix, LogRow};
pub use norm::NormValue;
pub use vanishing::VanishingSet;
