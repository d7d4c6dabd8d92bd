//! Exact arithmetic, navigation and row statistics for `(u,v)`-Calkin–Wilf
//! trees.
//!
//! Each vertex `a/b` of `T(u,v)(z)` has left child `a/(ua+b)` and right child
//! `(a+vb)/b`. As the root `z` runs over the rationals in `[1/u, v]` the trees
//! partition the positive rationals, and the mean of row `n` approaches a
//! limit close to `v + ln 2 / u`. This crate provides:
//!
//! - [`rational`] and [`enclosure`]: exact rationals and certified bounds,
//! - [`contfrac`]: continued fractions and coefficient-level comparisons,
//! - [`tree`]: children, parents, root location and descendant tests,
//! - [`row`]: streaming and parallel per-row aggregates,
//! - [`analysis`]: convergence experiments and identity checks,
//! - [`cli`]: the `cwforest` command line.

pub mod analysis;
pub mod cli;
pub mod contfrac;
pub mod enclosure;
pub mod error;
pub mod rational;
pub mod row;
pub mod tree;

pub use contfrac::{cf_length, ContinuedFraction};
pub use enclosure::Enclosure;
pub use error::{Error, Result};
pub use rational::{ArithOp, Rational};
pub use row::{Mode, RowConfig, RowStats, RowValue};
pub use tree::{Direction, Location, TreeParams, TreePath};
