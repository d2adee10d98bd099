//! Symbolic engine for the horizontal complexes of local Lie groups.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod builtins;
pub mod check;
pub mod cohomology;
pub mod derive;
pub mod expr;
pub mod forms;
pub mod geometry;
pub mod input;
pub mod linalg;
pub mod ops;
pub mod report;
pub mod suites;
