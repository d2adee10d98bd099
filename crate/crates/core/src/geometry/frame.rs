use num_rational::BigRational;

use crate::algebra::StructureConstants;
use crate::expr::{Block, Expr, SamplePoint, VarRef};
use crate::linalg::QMatrix;

use super::group::{constants, x_vars};
use super::splitting::Splitting;
use super::tensor::{lie_bracket, TensorField};
use super::GeometryError;

/// Parallel frame of a splitting: field `a` is `x -> eps(base, x) e_a`.
pub fn invariant_frame(s: &Splitting, base: &[BigRational]) -> Result<Vec<TensorField>, GeometryError> {
    let m = s.between(&constants(base), &x_vars(s.dim));
    let frame: Vec<TensorField> = (0..s.dim)
        .map(|a| TensorField::vector((0..s.dim).map(|i| m[i][a].clone()).collect()))
        .collect();
    if frame_matrix(&frame, base)?.rank() < s.dim {
        return Err(GeometryError::DegenerateFrame);
    }
    Ok(frame)
}

fn point(base: &[BigRational]) -> SamplePoint {
    let mut p = SamplePoint::new();
    for (i, v) in base.iter().enumerate() {
        p.set(VarRef::x(i), v.clone());
    }
    p
}

fn eval_vector(v: &[Expr], at: &SamplePoint) -> Result<Vec<BigRational>, GeometryError> {
    v.iter()
        .map(|e| e.eval_exact(at).map_err(GeometryError::Eval))
        .collect()
}

/// Columns are the frame vectors at `base`.
pub fn frame_matrix(frame: &[TensorField], base: &[BigRational]) -> Result<QMatrix, GeometryError> {
    let at = point(base);
    let cols = frame
        .iter()
        .map(|f| eval_vector(&f.comps, &at))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QMatrix::from_columns(base.len(), &cols))
}

/// `c^k_{ij}`: the bracket `[xi_i, xi_j]` at `base`, in the frame basis there.
pub fn structure_constants(frame: &[TensorField], base: &[BigRational]) -> Result<StructureConstants, GeometryError> {
    let n = frame.len();
    let at = point(base);
    let f = frame_matrix(frame, base)?;
    let mut brackets = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            brackets.push(eval_vector(&lie_bracket(&frame[i], &frame[j]).comps, &at)?);
        }
    }
    let coords = f
        .solve(&QMatrix::from_columns(n, &brackets))
        .ok_or(GeometryError::DegenerateFrame)?;
    let mut c = StructureConstants::zero(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                c.set(k, i, j, coords.get(k, i * n + j).clone());
            }
        }
    }
    c.validate().map_err(GeometryError::Algebra)?;
    Ok(c)
}

/// The matrix `eps(b2, b1)` relating frames at two bases: the frame based at
/// `b2` equals the frame based at `b1` times this matrix.
pub fn frame_change(s: &Splitting, b1: &[BigRational], b2: &[BigRational]) -> Result<QMatrix, GeometryError> {
    let m = s.between(&constants(b2), &constants(b1));
    let empty = SamplePoint::new();
    let rows = m
        .iter()
        .map(|row| eval_vector(row, &empty))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QMatrix::from_rows(rows))
}

/// Point block coordinates as expressions, for symbolic bases.
pub fn symbolic_point(block: Block, dim: usize) -> Vec<Expr> {
    (0..dim).map(|i| Expr::var(VarRef { block, index: i })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::builtins;
    use crate::expr::identity::{check_zero_all, equiv_components, IdentityConfig, Verdict};
    use crate::expr::{parse, ParseContext};
    use crate::geometry::splitting::Variant;

    fn cfg() -> IdentityConfig {
        IdentityConfig::default()
    }

    #[test]
    fn heisenberg_frame_and_constants() {
        let g = builtins::group("heisenberg3").unwrap();
        let s = Splitting::from_group(&g, Variant::Tilde);
        let frame = invariant_frame(&s, &g.identity).unwrap();
        let ctx = ParseContext::new(3, 1);
        let want = ["1", "0", "0", "0", "1", "x1", "0", "0", "1"].map(|t| parse(t, &ctx).unwrap());
        let got: Vec<Expr> = frame.iter().flat_map(|f| f.comps.clone()).collect();
        assert_eq!(equiv_components(&got, &want, &[], &cfg()), Verdict::Equal);
        let conn = s.connection();
        for f in &frame {
            assert_eq!(
                check_zero_all(&conn.covariant_derivative(f).comps, &[], &cfg()),
                Verdict::Equal
            );
        }
        let c = structure_constants(&frame, &g.identity).unwrap();
        assert_eq!(c.entries(), vec![(1, 2, 3, rational(1))]);
    }

    #[test]
    fn affine_constants() {
        let g = builtins::group("affine2").unwrap();
        let s = Splitting::from_group(&g, Variant::Tilde);
        let frame = invariant_frame(&s, &g.identity).unwrap();
        let c = structure_constants(&frame, &g.identity).unwrap();
        assert_eq!(c.entries(), vec![(1, 2, 2, rational(1))]);
    }

    #[test]
    fn constants_at_another_base_differ_by_frame_change() {
        let g = builtins::group("affine2").unwrap();
        let s = Splitting::from_group(&g, Variant::Tilde);
        let b1 = g.identity.clone();
        let b2 = vec![rational(3), rational(-2)];
        let c1 = structure_constants(&invariant_frame(&s, &b1).unwrap(), &b1).unwrap();
        let c2 = structure_constants(&invariant_frame(&s, &b2).unwrap(), &b2).unwrap();
        assert_ne!(c1, c2);
        let p = frame_change(&s, &b1, &b2).unwrap();
        assert_eq!(c1.change_basis(&p).unwrap(), c2);
    }
}
