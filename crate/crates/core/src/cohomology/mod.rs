//! Localized invariant complexes as exact matrices, and their Betti numbers.
//!
//! Two independent constructions are provided. The Chevalley-Eilenberg
//! oracle works from structure constants alone. The horizontal route
//! builds invariant forms, applies the symbolic horizontal differential
//! and evaluates at a base point.

mod ce;
mod module;
mod routes;

use std::fmt;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::expr::EvalError;
use crate::geometry::GeometryError;
use crate::linalg::{cohomology_dims, LinalgError, QMatrix};

pub use ce::{ce_invariant_matrices, ce_matrices, lie_derivative_matrices, trivial_copies};
pub use module::CoefficientModule;
pub use routes::{biinv36_matrices, hat35_matrices, ilhc_matrices, ilhdc_row_matrices};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
    #[error("{0}")]
    Linalg(#[from] LinalgError),
    #[error("{0}")]
    Geometry(#[from] GeometryError),
    #[error("evaluation at the base point failed: {0}")]
    Eval(#[from] EvalError),
    #[error("coefficients action is not a representation")]
    NotRepresentation,
    #[error("invariant subspaces are not preserved by the differential in degree {0}")]
    NotPreserved(usize),
    #[error("{0}")]
    Unsupported(String),
}

/// Which invariant complex a matrix family represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComplexKind {
    /// Tilde-invariant linear forms with the horizontal differential.
    Ilhc,
    /// Hat-invariant linear forms.
    Hat35,
    /// Forms invariant under both structures.
    Biinv36,
    /// A row of the invariant double complex: hat-invariant multi-point forms.
    IlhdcRow,
}

impl ComplexKind {
    pub fn name(self) -> &'static str {
        match self {
            ComplexKind::Ilhc => "ilhc",
            ComplexKind::Hat35 => "hat35",
            ComplexKind::Biinv36 => "biinv36",
            ComplexKind::IlhdcRow => "ilhdc-row",
        }
    }

    pub fn parse(s: &str) -> Option<ComplexKind> {
        [
            ComplexKind::Ilhc,
            ComplexKind::Hat35,
            ComplexKind::Biinv36,
            ComplexKind::IlhdcRow,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A finite cochain complex with labeled bases. `d[k]` maps degree `k`
/// (columns) to degree `k + 1` (rows). `degrees` is the number of cochain
/// degrees whose cohomology is reported; one extra differential may be
/// present so the top reported degree is computed correctly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedComplex {
    pub label: String,
    pub coefficients: String,
    pub bases: Vec<Vec<String>>,
    pub d: Vec<QMatrix>,
    pub degrees: usize,
}

impl LocalizedComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).take(self.degrees).collect()
    }
}

/// Betti numbers in degrees `0..degrees`; composition to zero is checked.
pub fn betti_table(c: &LocalizedComplex) -> Result<Vec<usize>, CohomologyError> {
    if c.d.is_empty() {
        return Ok(c.bases.iter().map(Vec::len).take(c.degrees).collect());
    }
    let mut dims = cohomology_dims(&c.d)?;
    dims.truncate(c.degrees);
    Ok(dims)
}

/// Differentials needed to report degrees `0..=max_k` of an `n`-dimensional
/// algebra: `d_0 .. d_{top-1}` with `top = min(max_k + 1, n)`.
pub(crate) fn top_degree(n: usize, max_k: usize) -> usize {
    (max_k + 1).min(n)
}

#[cfg(test)]
mod tests;
