//! Horizontal forms: the linear complexes over the tangent bundle, the
//! nonlinear multi-point complexes, and the maps between them.

pub mod index;
mod linear;
mod nonlinear;
pub mod random;

pub use linear::{
    box_linear, determinant, dhat, extend_on_t, fiber_vars, localize, pullback, total_derivatives, FormOnT, SlotKind,
};
pub use nonlinear::{box_group, box_nonlinear, delta, dtilde, extend_nonlinear, linearize, Invariance, NonlinearForm};
