//! TOML definitions of groups, splittings, algebras and forms.
//!
//! ```toml
//! [group]
//! name = "heisenberg"
//! dim = 3
//! multiplication = ["x1 + y1", "x2 + y2", "x3 + y3 + x1*y2"]
//! inverse = ["-x1", "-x2", "-x3 + x1*x2"]
//! identity = [0, 0, 0]
//! constraints = []
//! ```
//!
//! A `[splitting]` table has `dim`, `epsilon` (rows of expressions in `x`,
//! `y`) and `constraints`. An `[algebra]` table has `dim` and `brackets`,
//! each a string `"i j k coeff"` meaning `[e_i, e_j] = coeff e_k`.
//!
//! Form files list `copies`, `degree`, optional `slots` and `linear`, and a
//! `[components]` table keyed by one-based index tuples such as `"1,3"`
//! (the empty key `""` for degree zero).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use thiserror::Error;

use crate::algebra::StructureConstants;
use crate::builtins::{self, Builtin};
use crate::expr::{parse, Expr, ParseContext};
use crate::forms::index::{binomial, IndexSet};
use crate::forms::{FormOnT, NonlinearForm, SlotKind};
use crate::geometry::{GroupLaw, Splitting, Variant};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("invalid TOML: {0}")]
    Toml(String),
    #[error("in {field}: {message}")]
    Expression { field: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// What a definition file or builtin name describes.
#[derive(Clone, Debug)]
pub enum Subject {
    Group(GroupLaw),
    Splitting {
        name: String,
        splitting: Splitting,
    },
    Algebra {
        name: String,
        constants: StructureConstants,
    },
}

impl Subject {
    pub fn name(&self) -> &str {
        match self {
            Subject::Group(g) => &g.name,
            Subject::Splitting { name, .. } | Subject::Algebra { name, .. } => name,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Subject::Group(g) => g.dim,
            Subject::Splitting { splitting, .. } => splitting.dim,
            Subject::Algebra { constants, .. } => constants.dim,
        }
    }

    /// Whether any defining expression needs floating-point evaluation.
    pub fn is_transcendental(&self) -> bool {
        let any = |v: &[Expr]| v.iter().any(Expr::is_transcendental);
        match self {
            Subject::Group(g) => any(&g.mult) || any(&g.inv) || any(&g.constraints),
            Subject::Splitting { splitting, .. } => splitting.eps.iter().any(|r| any(r)),
            Subject::Algebra { .. } => false,
        }
    }
}

pub fn from_builtin(name: &str) -> Result<Subject, InputError> {
    match builtins::builtin(name).map_err(|e| InputError::Invalid(e.to_string()))? {
        Builtin::Group(g) => Ok(Subject::Group(g)),
        Builtin::Algebra { name, constants } => Ok(Subject::Algebra { name, constants }),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    group: Option<GroupTable>,
    splitting: Option<SplittingTable>,
    algebra: Option<AlgebraTable>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupTable {
    name: Option<String>,
    dim: usize,
    variables: Option<Vec<String>>,
    multiplication: Vec<String>,
    inverse: Vec<String>,
    identity: Vec<Number>,
    #[serde(default)]
    constraints: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SplittingTable {
    name: Option<String>,
    dim: usize,
    epsilon: Vec<Vec<String>>,
    #[serde(default)]
    constraints: Vec<String>,
    variant: Option<Variant>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraTable {
    name: Option<String>,
    dim: usize,
    brackets: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Text(String),
}

fn rational_from(n: &Number, field: &str) -> Result<BigRational, InputError> {
    match n {
        Number::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
        Number::Text(s) => {
            parse_rational(s).ok_or_else(|| InputError::Invalid(format!("{field}: '{s}' is not a rational number")))
        }
    }
}

/// Reads `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(p.trim().parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

fn expr(text: &str, ctx: &ParseContext, field: &str) -> Result<Expr, InputError> {
    parse(text, ctx).map_err(|e| InputError::Expression {
        field: field.into(),
        message: e.to_string(),
    })
}

fn exprs(texts: &[String], ctx: &ParseContext, field: &str, len: usize) -> Result<Vec<Expr>, InputError> {
    if texts.len() != len {
        return Err(InputError::Invalid(format!(
            "{field} has {} entries, expected {len}",
            texts.len()
        )));
    }
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| expr(t, ctx, &format!("{field}[{}]", i + 1)))
        .collect()
}

fn constraints(texts: &[String], dim: usize) -> Result<Vec<Expr>, InputError> {
    let ctx = ParseContext::new(dim, 1);
    texts
        .iter()
        .map(|t| {
            let body = t.trim();
            let body = body
                .strip_suffix("!= 0")
                .or_else(|| body.strip_suffix("!=0"))
                .unwrap_or(body);
            expr(body.trim(), &ctx, "constraints")
        })
        .collect()
}

/// Parses a definition file holding exactly one of the three tables.
pub fn load_subject(text: &str) -> Result<Subject, InputError> {
    let file: File = toml::from_str(text).map_err(|e| InputError::Toml(e.to_string()))?;
    match (file.group, file.splitting, file.algebra) {
        (Some(g), None, None) => group(g),
        (None, Some(s), None) => splitting(s),
        (None, None, Some(a)) => algebra(a),
        _ => Err(InputError::Invalid(
            "expected exactly one of [group], [splitting], [algebra]".into(),
        )),
    }
}

fn group(t: GroupTable) -> Result<Subject, InputError> {
    let n = t.dim;
    if n == 0 {
        return Err(InputError::Invalid("dim must be positive".into()));
    }
    if let Some(v) = &t.variables {
        if v.len() != n {
            return Err(InputError::Invalid(format!(
                "variables lists {} names, expected {n}",
                v.len()
            )));
        }
    }
    let ctx2 = ParseContext::new(n, 2);
    let ctx1 = ParseContext::new(n, 1);
    if t.identity.len() != n {
        return Err(InputError::Invalid(format!(
            "identity has {} entries, expected {n}",
            t.identity.len()
        )));
    }
    Ok(Subject::Group(GroupLaw {
        name: t.name.unwrap_or_else(|| "group".into()),
        dim: n,
        mult: exprs(&t.multiplication, &ctx2, "multiplication", n)?,
        inv: exprs(&t.inverse, &ctx1, "inverse", n)?,
        identity: t
            .identity
            .iter()
            .map(|v| rational_from(v, "identity"))
            .collect::<Result<_, _>>()?,
        constraints: constraints(&t.constraints, n)?,
    }))
}

fn splitting(t: SplittingTable) -> Result<Subject, InputError> {
    let n = t.dim;
    if n == 0 || t.epsilon.len() != n {
        return Err(InputError::Invalid(format!("epsilon must have {n} rows")));
    }
    let ctx = ParseContext::new(n, 2);
    let eps = t
        .epsilon
        .iter()
        .enumerate()
        .map(|(i, row)| exprs(row, &ctx, &format!("epsilon[{}]", i + 1), n))
        .collect::<Result<Vec<_>, _>>()?;
    let splitting = Splitting::new(
        n,
        eps,
        t.variant.unwrap_or(Variant::Tilde),
        constraints(&t.constraints, n)?,
    );
    Ok(Subject::Splitting {
        name: t.name.unwrap_or_else(|| "splitting".into()),
        splitting,
    })
}

fn algebra(t: AlgebraTable) -> Result<Subject, InputError> {
    let mut entries = Vec::new();
    for b in &t.brackets {
        let parts: Vec<&str> = b.split_whitespace().collect();
        let bad = || InputError::Invalid(format!("bracket '{b}' is not of the form \"i j k coeff\""));
        if parts.len() != 4 {
            return Err(bad());
        }
        let idx: Vec<usize> = parts[..3]
            .iter()
            .map(|p| p.parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let coeff = parse_rational(parts[3]).ok_or_else(bad)?;
        entries.push((idx[0], idx[1], idx[2], coeff));
    }
    let constants =
        StructureConstants::from_brackets(t.dim, &entries).map_err(|e| InputError::Invalid(e.to_string()))?;
    Ok(Subject::Algebra {
        name: t.name.unwrap_or_else(|| "algebra".into()),
        constants,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormTable {
    copies: usize,
    degree: usize,
    slots: Option<Vec<SlotKind>>,
    #[serde(default)]
    linear: bool,
    #[serde(default)]
    components: BTreeMap<String, String>,
}

/// A parsed form file: either a multi-point form, or (when `slots` is
/// given) a form over the tangent bundle.
#[derive(Clone, Debug)]
pub enum FormInput {
    Nonlinear(NonlinearForm),
    OnT(FormOnT),
}

fn index_key(key: &str, dim: usize, degree: usize) -> Result<Vec<usize>, InputError> {
    let bad = |why: &str| InputError::Invalid(format!("component key '{key}': {why}"));
    let idx: Vec<usize> = if key.trim().is_empty() {
        Vec::new()
    } else {
        key.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad("not a list of indices")))
            .collect::<Result<_, _>>()?
    };
    if idx.len() != degree {
        return Err(bad(&format!("expected {degree} indices")));
    }
    if idx.iter().any(|&i| i == 0 || i > dim) {
        return Err(bad(&format!("indices run from 1 to {dim}")));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("indices must be strictly increasing"));
    }
    Ok(idx.into_iter().map(|i| i - 1).collect())
}

pub fn load_form(text: &str, dim: usize) -> Result<FormInput, InputError> {
    let t: FormTable = toml::from_str(text).map_err(|e| InputError::Toml(e.to_string()))?;
    if t.copies == 0 {
        return Err(InputError::Invalid("copies must be at least 1".into()));
    }
    if t.degree > dim {
        return Err(InputError::Invalid(format!(
            "degree {} exceeds dimension {dim}",
            t.degree
        )));
    }
    let slots = t.slots.clone().unwrap_or_default();
    let ctx = ParseContext::new(dim, t.copies).with_fibers(slots.len());
    let set = IndexSet::new(dim, t.degree);
    let mut comps = vec![Expr::zero(); binomial(dim, t.degree)];
    for (key, value) in &t.components {
        let idx = index_key(key, dim, t.degree)?;
        let pos = set.position(&idx).expect("validated key");
        comps[pos] = expr(value, &ctx, &format!("components.\"{key}\""))?;
    }
    match t.slots {
        Some(slots) => {
            if t.copies != 1 {
                return Err(InputError::Invalid(
                    "forms with fiber slots live on a single point copy".into(),
                ));
            }
            Ok(FormInput::OnT(FormOnT::new(dim, t.degree, slots, comps, t.linear)))
        }
        None => Ok(FormInput::Nonlinear(NonlinearForm::new(dim, t.copies, t.degree, comps))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::identity::IdentityConfig;

    #[test]
    fn group_file_round_trip() {
        let text = r#"
            [group]
            name = "affine"
            dim = 2
            multiplication = ["x1*y1", "x1*y2 + x2"]
            inverse = ["1/x1", "-x2/x1"]
            identity = [1, "0"]
            constraints = ["x1 != 0"]
        "#;
        let Subject::Group(g) = load_subject(text).unwrap() else {
            panic!("group expected")
        };
        assert_eq!(g.constraints[0].to_string(), "x1");
        assert!(g.verify_axioms(&IdentityConfig::default()).iter().all(|c| c.passed()));
    }

    #[test]
    fn algebra_and_splitting_files() {
        let a = load_subject("[algebra]\ndim = 3\nbrackets = [\"1 2 2 2\", \"1 3 3 -2\", \"2 3 1 1\"]\n").unwrap();
        let Subject::Algebra { constants, .. } = a else {
            panic!()
        };
        assert_eq!(constants, builtins::sl2());
        let s = load_subject("[splitting]\ndim = 1\nepsilon = [[\"1\"]]\n").unwrap();
        assert!(matches!(s, Subject::Splitting { .. }));
    }

    #[test]
    fn errors_are_reported() {
        assert!(matches!(load_subject("[group]\ndim = 1"), Err(InputError::Toml(_))));
        let e = load_subject("[algebra]\ndim = 2\nbrackets = [\"1 2\"]\n").unwrap_err();
        assert!(e.to_string().contains("i j k coeff"));
        let e = load_subject("[group]\ndim = 1\nmultiplication = [\"x1 + q1\"]\ninverse = [\"-x1\"]\nidentity = [0]\n")
            .unwrap_err();
        assert!(matches!(e, InputError::Expression { .. }));
        assert!(load_subject("").is_err());
    }

    #[test]
    fn form_files() {
        let f = load_form("copies = 2\ndegree = 1\n[components]\n\"2\" = \"y1 - x1\"\n", 2).unwrap();
        let FormInput::Nonlinear(w) = f else { panic!() };
        assert!(w.comps[0].is_zero());
        assert_eq!(w.comps[1].to_string(), "y1 - x1");
        let f = load_form(
            "copies = 1\ndegree = 0\nslots = [\"vector\"]\nlinear = true\n[components]\n\"\" = \"x1*xi1\"\n",
            2,
        )
        .unwrap();
        assert!(matches!(f, FormInput::OnT(_)));
        assert!(load_form("copies = 1\ndegree = 2\n[components]\n\"2,1\" = \"1\"\n", 2).is_err());
    }
}
