//! Entanglement of purification, its multipartite generalization, and the
//! machinery around it: stabilizer canonical counts, Petz recovery, and
//! 2-producibility certification for small quantum states.

// `!(x >= 0.0)` is how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod eop;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod qdense;
pub mod recovery;
pub mod stab;
pub mod structure;

pub use error::{Error, Result};
