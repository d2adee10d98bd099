//! Applying differentials to forms read from files.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::Expr;
use crate::forms::index::{label, IndexSet};
use crate::forms::{delta, dhat, dtilde, linearize, FormOnT, NonlinearForm, SlotKind};
use crate::geometry::{Splitting, Variant};
use crate::input::{FormInput, Subject};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    Dhat,
    Dtilde,
    Delta,
    Linearize,
}

impl Operator {
    pub fn parse(s: &str) -> Option<Operator> {
        Some(match s {
            "dhat" => Operator::Dhat,
            "dtilde" => Operator::Dtilde,
            "delta" => Operator::Delta,
            "linearize" => Operator::Linearize,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("{0}")]
    Shape(String),
    #[error("operators need a group or a splitting, not bare structure constants")]
    NoSplitting,
}

fn tilde_of(subject: &Subject) -> Result<Splitting, OpError> {
    match subject {
        Subject::Group(g) => Ok(Splitting::from_group(g, Variant::Tilde)),
        Subject::Splitting { splitting, .. } => Ok(splitting.clone()),
        Subject::Algebra { .. } => Err(OpError::NoSplitting),
    }
}

fn nonlinear(form: &FormInput, op: &str) -> Result<NonlinearForm, OpError> {
    match form {
        FormInput::Nonlinear(w) => Ok(w.clone()),
        FormInput::OnT(_) => Err(OpError::Shape(format!(
            "{op} acts on multi-point forms; drop `slots` from the form file"
        ))),
    }
}

/// `dhat` uses the hat connection (the tilde one with lower indices
/// exchanged); the other operators use the tilde splitting.
pub fn apply(subject: &Subject, op: Operator, form: &FormInput) -> Result<FormInput, OpError> {
    let s = tilde_of(subject)?;
    if form_dim(form) != s.dim {
        return Err(OpError::Shape(format!(
            "form dimension {} does not match {}",
            form_dim(form),
            s.dim
        )));
    }
    Ok(match op {
        Operator::Dhat => {
            let f = match form {
                FormInput::OnT(f) => f.clone(),
                FormInput::Nonlinear(w) if w.copies == 1 => {
                    FormOnT::new(w.dim, w.degree, vec![], w.comps.clone(), true)
                }
                FormInput::Nonlinear(_) => {
                    return Err(OpError::Shape(
                        "dhat acts on forms over the tangent bundle (copies = 1)".into(),
                    ))
                }
            };
            FormInput::OnT(dhat(&s.connection().swapped(), &f))
        }
        Operator::Dtilde => FormInput::Nonlinear(dtilde(&s, &nonlinear(form, "dtilde")?)),
        Operator::Delta => FormInput::Nonlinear(delta(&s, &nonlinear(form, "delta")?)),
        Operator::Linearize => {
            let w = nonlinear(form, "linearize")?;
            if w.copies < 2 {
                return Err(OpError::Shape("linearize needs at least two point copies".into()));
            }
            FormInput::OnT(linearize(&w))
        }
    })
}

fn form_dim(form: &FormInput) -> usize {
    match form {
        FormInput::Nonlinear(w) => w.dim,
        FormInput::OnT(f) => f.dim,
    }
}

fn components(comps: &[Expr], dim: usize, degree: usize) -> BTreeMap<String, String> {
    IndexSet::new(dim, degree)
        .tuples
        .iter()
        .zip(comps.iter().map(Expr::simplified))
        .filter(|(_, e)| !e.is_zero())
        .map(|(idx, e)| (label(idx), e.to_string()))
        .collect()
}

fn slot_name(s: SlotKind) -> &'static str {
    match s {
        SlotKind::Vector => "vector",
        SlotKind::Covector => "covector",
    }
}

/// JSON in the form-file shape, and the same as a TOML block that can be
/// read back with `--form`.
pub fn render(form: &FormInput) -> (Value, String) {
    let (copies, degree, slots, linear, comps) = match form {
        FormInput::Nonlinear(w) => (w.copies, w.degree, None, None, components(&w.comps, w.dim, w.degree)),
        FormInput::OnT(f) => (
            1,
            f.degree,
            Some(f.slots.clone()),
            Some(f.linear),
            components(&f.comps, f.dim, f.degree),
        ),
    };
    let mut json = json!({ "copies": copies, "degree": degree, "components": comps });
    let mut toml = format!("copies = {copies}\ndegree = {degree}\n");
    if let Some(slots) = &slots {
        let names: Vec<&str> = slots.iter().map(|s| slot_name(*s)).collect();
        json["slots"] = json!(names);
        json["linear"] = json!(linear);
        toml.push_str(&format!(
            "slots = [{}]\nlinear = {}\n",
            names.iter().map(|n| format!("\"{n}\"")).collect::<Vec<_>>().join(", "),
            linear.unwrap_or(false)
        ));
    }
    toml.push_str("\n[components]\n");
    for (k, v) in &comps {
        toml.push_str(&format!("\"{k}\" = \"{v}\"\n"));
    }
    (json, format!("```toml\n{toml}```\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::{from_builtin, load_form};

    #[test]
    fn delta_of_a_function_on_two_points() {
        let g = from_builtin("abelian:1").unwrap();
        let w = load_form("copies = 2\ndegree = 0\n[components]\n\"\" = \"y1 - x1\"\n", 1).unwrap();
        let FormInput::Nonlinear(d) = apply(&g, Operator::Delta, &w).unwrap() else {
            panic!()
        };
        assert_eq!(d.copies, 3);
        // (z - y) - (z - x) + (y - x) = 0
        assert!(crate::expr::identity::check_zero_all(&d.comps, &[], &Default::default()).is_equal());
    }

    #[test]
    fn rendered_output_reads_back() {
        let g = from_builtin("heisenberg3").unwrap();
        let w = load_form("copies = 2\ndegree = 1\n[components]\n\"1\" = \"y3*x2\"\n", 3).unwrap();
        let out = apply(&g, Operator::Linearize, &w).unwrap();
        let (json, md) = render(&out);
        assert_eq!(json["slots"], json!(["vector"]));
        let toml = md.trim_start_matches("```toml\n").trim_end_matches("```\n");
        assert!(matches!(load_form(toml, 3).unwrap(), FormInput::OnT(_)));
        assert!(apply(&g, Operator::Delta, &out).is_err());
    }
}
