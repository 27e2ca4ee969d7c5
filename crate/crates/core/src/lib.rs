//! Naive dynamical invariants on desk-scale systems.
//!
//! The crate computes and brackets naive mean dimension, naive entropy,
//! naive mean rank and orbit capacity for shifts over finitely generated
//! groups and for finitely presented group-ring modules, together with the
//! combinatorial machinery behind them: sofic maps, quasi-tilings and
//! microstate spaces.

pub mod error;
pub mod group;
pub mod invariants;
pub mod meanrank;
pub mod microstates;
pub mod rational;
pub mod sofic;
pub mod spaces;
pub mod tiling;

pub use error::{Error, Result};
pub use group::{FiniteWindow, Group, GroupElement, GroupSpec};
pub use rational::Rational;
