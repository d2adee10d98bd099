//! Built-in groups and algebras.
//!
//! | name | law |
//! |------|-----|
//! | `abelian:n` | `x + y` on `R^n` |
//! | `heisenberg3` | `(x1+y1, x2+y2, x3+y3+x1*y2)` |
//! | `affine2` | `(x1*y1, x1*y2+x2)`, domain `x1 != 0` |
//! | `uppertriangular3` | invertible upper triangular 2x2 matrices `[[x1,x2],[0,x3]]` under multiplication |
//! | `sl2-constants` | `[e1,e2]=2e2`, `[e1,e3]=-2e3`, `[e2,e3]=e1` |

use thiserror::Error;

use crate::algebra::{rational, StructureConstants};
use crate::expr::{parse, Expr, ParseContext};
use crate::geometry::{GroupLaw, Splitting, Variant};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BuiltinError {
    #[error("unknown builtin '{0}' (known: abelian:N, heisenberg3, affine2, uppertriangular3, sl2-constants)")]
    Unknown(String),
}

/// A builtin is either a group law or bare structure constants.
#[derive(Clone, Debug)]
pub enum Builtin {
    Group(GroupLaw),
    Algebra {
        name: String,
        constants: StructureConstants,
    },
}

pub const GROUP_NAMES: [&str; 5] = ["abelian:2", "abelian:3", "heisenberg3", "affine2", "uppertriangular3"];

pub fn builtin(name: &str) -> Result<Builtin, BuiltinError> {
    if name == "sl2-constants" {
        return Ok(Builtin::Algebra {
            name: name.to_string(),
            constants: sl2(),
        });
    }
    group(name).map(Builtin::Group)
}

fn exprs(texts: &[&str], dim: usize) -> Vec<Expr> {
    let ctx = ParseContext::new(dim, 2);
    texts
        .iter()
        .map(|t| parse(t, &ctx).expect("builtin expression parses"))
        .collect()
}

pub fn group(name: &str) -> Result<GroupLaw, BuiltinError> {
    let law = |dim: usize, mult: &[&str], inv: &[&str], identity: &[i64], constraints: &[&str]| GroupLaw {
        name: name.to_string(),
        dim,
        mult: exprs(mult, dim),
        inv: exprs(inv, dim),
        identity: identity.iter().map(|&v| rational(v)).collect(),
        constraints: exprs(constraints, dim),
    };
    if let Some(n) = name.strip_prefix("abelian:") {
        let n: usize = n
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| BuiltinError::Unknown(name.into()))?;
        let mult: Vec<String> = (1..=n).map(|i| format!("x{i} + y{i}")).collect();
        let inv: Vec<String> = (1..=n).map(|i| format!("-x{i}")).collect();
        let mult: Vec<&str> = mult.iter().map(String::as_str).collect();
        let inv: Vec<&str> = inv.iter().map(String::as_str).collect();
        return Ok(law(n, &mult, &inv, &vec![0; n], &[]));
    }
    match name {
        "heisenberg3" => Ok(law(
            3,
            &["x1 + y1", "x2 + y2", "x3 + y3 + x1*y2"],
            &["-x1", "-x2", "-x3 + x1*x2"],
            &[0, 0, 0],
            &[],
        )),
        "affine2" => Ok(law(2, &["x1*y1", "x1*y2 + x2"], &["1/x1", "-x2/x1"], &[1, 0], &["x1"])),
        "uppertriangular3" => Ok(law(
            3,
            &["x1*y1", "x1*y2 + x2*y3", "x3*y3"],
            &["1/x1", "-x2/(x1*x3)", "1/x3"],
            &[1, 0, 1],
            &["x1", "x3"],
        )),
        _ => Err(BuiltinError::Unknown(name.to_string())),
    }
}

pub fn sl2() -> StructureConstants {
    StructureConstants::from_brackets(
        3,
        &[(1, 2, 2, rational(2)), (1, 3, 3, rational(-2)), (2, 3, 1, rational(1))],
    )
    .expect("valid indices")
}

/// A splitting of the plane that satisfies the arrow axioms but is not a
/// local Lie group: `eps = [[1, y1^2 - x1^2], [0, 1]]`.
pub fn non_integrable_splitting() -> Splitting {
    let eps = vec![exprs(&["1", "y1^2 - x1^2"], 2), exprs(&["0", "1"], 2)];
    Splitting::new(2, eps, Variant::Tilde, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for n in GROUP_NAMES {
            assert!(group(n).is_ok(), "{n}");
        }
        assert!(matches!(builtin("sl2-constants"), Ok(Builtin::Algebra { .. })));
        assert!(group("abelian:0").is_err());
        assert!(builtin("so3").is_err());
        assert_eq!(group("abelian:3").unwrap().mult[0].to_string(), "x1 + y1");
    }

    #[test]
    fn sl2_passes_jacobi() {
        assert_eq!(sl2().validate(), Ok(()));
    }
}
