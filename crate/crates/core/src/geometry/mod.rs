//! Group laws, splittings, connections and the tensors derived from them.

mod frame;
mod group;
mod splitting;
mod tensor;
mod translation;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::expr::EvalError;

pub use frame::{frame_change, frame_matrix, invariant_frame, structure_constants, symbolic_point};
pub use group::{at_x, at_xy, constants, point_vars, x_vars, y_vars, z_vars, GroupLaw};
pub use splitting::{identity_matrix, mat_mul, mat_vec, Matrix, Splitting, Variant};
pub use tensor::{flatten_index, lie_bracket, lie_derivative, unflatten, Connection, TensorField};
pub use translation::{
    dpsi, il_pushforward, left_translation, psi, right_translation, translation_g, translation_h, TranslationMap,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("evaluation failed: {0}")]
    Eval(EvalError),
    #[error("frame is degenerate at the base point")]
    DegenerateFrame,
    #[error("{0}")]
    Algebra(AlgebraError),
}
