//! Finite approximations of the reflexive domain `Value = (Value → Value)⊥`.
//!
//! `V₀ = {⊥}` and `Vᵣ₊₁` is `⊥` plus the monotone maps `Vᵣ → Vᵣ`. Each rank is
//! a finite lattice, so least upper bounds and least fixed points are exact.
//! Ranks are linked by embedding-projection pairs.

mod elem;
mod env;
mod kernel;

use thiserror::Error;

pub use elem::{
    convert, embed, enumerate, fn_make, fn_project_apply, lattice_height, leq, lub, project, DomElem,
};
pub use env::{lfp_env, lfp_env_counted, Env};
pub use kernel::{MAX_ENUM_RANK, MAX_RANK};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("rank {rank} is out of range (at most {max})")]
    RankTooLarge { rank: u8, max: u8 },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(u8, u8),
    #[error("no element {idx} at rank {rank}")]
    BadIndex { rank: u8, idx: usize },
    #[error("table of length {len} does not fit rank {rank}")]
    TableShape { rank: u8, len: usize },
    #[error("function table is not monotone")]
    NonMonotone,
    #[error("rank 0 has nothing below it")]
    NoProjection,
    #[error("non-monotone functional: no fixed point after {calls} iterations")]
    NotConverged { calls: usize },
    #[error("malformed domain JSON: {0}")]
    Json(String),
}

#[cfg(test)]
mod tests;
