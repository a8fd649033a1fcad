//! Game rules, an exhaustive backward-induction solver and the closed-form
//! P-position constructions for m-Modular Nim.
//!
//! In m-Modular Nim a move either removes a positive number of tokens from a
//! single heap (Type I) or removes a positive multiple of `m` tokens in total,
//! spread over any heaps (Type II). Play is normal: the player unable to move
//! loses.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod closed_form;
mod error;
pub mod game;
pub mod solver;

pub use analysis::{analyze, Method};
pub use closed_form::{LevelParams, PSet};
pub use error::Error;
pub use game::{MoveDelta, MoveKind, Position, Rules};
pub use solver::{SolveRecord, Solver, Status, StatusGrid};
