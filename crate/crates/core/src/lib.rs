//! Conjugacy search in finitely presented split metabelian groups `B ⋊ Q`
//! with `Q` free abelian acting on `B ⊆ Q^s` through commuting integer
//! matrices.

pub mod bench;
pub mod cli;
pub mod conjugacy;
pub mod dlog;
pub mod error;
pub mod linalg;
pub mod linsolver;
pub mod membership;
pub mod presentation;
pub mod words;

pub use error::Error;
