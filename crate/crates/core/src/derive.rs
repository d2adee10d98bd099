//! Derived objects of a definition, printed as nonzero components.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::StructureConstants;
use crate::expr::format_rational;
use crate::expr::Expr;
use crate::geometry::{
    invariant_frame, structure_constants, unflatten, x_vars, y_vars, GeometryError, Splitting, Variant,
};
use crate::input::Subject;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Gamma,
    Torsion,
    Curvature,
    Frame,
    StructureConstants,
    EpsilonHat,
}

impl Quantity {
    pub const NAMES: [&'static str; 6] = [
        "gamma",
        "torsion",
        "curvature",
        "frame",
        "structure-constants",
        "epsilon-hat",
    ];

    pub fn parse(s: &str) -> Option<Quantity> {
        Some(match s {
            "gamma" => Quantity::Gamma,
            "torsion" => Quantity::Torsion,
            "curvature" => Quantity::Curvature,
            "frame" => Quantity::Frame,
            "structure-constants" => Quantity::StructureConstants,
            "epsilon-hat" => Quantity::EpsilonHat,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DeriveError {
    #[error("{what} needs {needs}")]
    Unsupported { what: &'static str, needs: &'static str },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A derived quantity as JSON and markdown.
#[derive(Clone, Debug, PartialEq)]
pub struct Derived {
    pub json: Value,
    pub markdown: String,
}

struct Section {
    name: String,
    entries: BTreeMap<String, String>,
}

/// Simplified nonzero components keyed by one-based index strings such as `"1,2,3"`.
fn entries(comps: &[Expr], dim: usize, rank: usize) -> BTreeMap<String, String> {
    comps
        .iter()
        .map(Expr::simplified)
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .map(|(flat, e)| {
            let idx = unflatten(flat, dim, rank);
            (
                idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","),
                e.to_string(),
            )
        })
        .collect()
}

fn section(name: impl Into<String>, comps: &[Expr], dim: usize, rank: usize) -> Section {
    Section {
        name: name.into(),
        entries: entries(comps, dim, rank),
    }
}

fn render(what: &str, layout: &str, sections: Vec<Section>) -> Derived {
    let mut map = serde_json::Map::new();
    let mut md = format!("{what}, components indexed {layout}, zero components omitted\n");
    for s in &sections {
        map.insert(s.name.clone(), json!(s.entries));
        md.push_str(&format!("\n**{}**\n\n", s.name));
        if s.entries.is_empty() {
            md.push_str("all components vanish\n");
        }
        for (k, v) in &s.entries {
            md.push_str(&format!("- `[{k}]` = `{v}`\n"));
        }
    }
    Derived {
        json: json!({ "quantity": what, "layout": layout, "sections": Value::Object(map) }),
        markdown: md,
    }
}

fn constants_section(c: &StructureConstants) -> Section {
    let entries = c
        .entries()
        .into_iter()
        .map(|(i, j, k, v)| (format!("{},{},{}", k, i, j), format_rational(&v)))
        .collect();
    Section {
        name: "structure constants".into(),
        entries,
    }
}

fn splitting_of(subject: &Subject, what: &'static str) -> Result<(Splitting, Option<Splitting>), DeriveError> {
    match subject {
        Subject::Group(g) => Ok((
            Splitting::from_group(g, Variant::Tilde),
            Some(Splitting::from_group(g, Variant::Hat)),
        )),
        Subject::Splitting { splitting, .. } => Ok((splitting.clone(), None)),
        Subject::Algebra { .. } => Err(DeriveError::Unsupported {
            what,
            needs: "a group or a splitting",
        }),
    }
}

pub fn derive(subject: &Subject, q: Quantity) -> Result<Derived, DeriveError> {
    let n = subject.dim();
    match q {
        Quantity::Gamma => {
            let (t, _) = splitting_of(subject, "gamma")?;
            let tc = t.connection();
            Ok(render(
                "connection",
                "[i,j,k] for Gamma^i_{jk}",
                vec![
                    section("tilde", &tc.gamma, n, 3),
                    section("hat", &tc.swapped().gamma, n, 3),
                ],
            ))
        }
        Quantity::Torsion => {
            let (t, _) = splitting_of(subject, "torsion")?;
            let tc = t.connection();
            Ok(render(
                "torsion",
                "[i,j,k] for T^i_{jk}",
                vec![
                    section("tilde", &tc.torsion().comps, n, 3),
                    section("hat", &tc.swapped().torsion().comps, n, 3),
                ],
            ))
        }
        Quantity::Curvature => {
            let (t, _) = splitting_of(subject, "curvature")?;
            let tc = t.connection();
            Ok(render(
                "curvature",
                "[a,s,r,b] for the linear tensors and [a,s,r] for the two-point tensor",
                vec![
                    section("tilde linear", &tc.curvature().comps, n, 4),
                    section("hat linear", &tc.swapped().curvature().comps, n, 4),
                    section("two-point", &t.nonlinear_curvature().comps, n, 3),
                ],
            ))
        }
        Quantity::Frame => {
            let Subject::Group(g) = subject else {
                return Err(DeriveError::Unsupported {
                    what: "frame",
                    needs: "a group",
                });
            };
            let mut sections = Vec::new();
            for v in [Variant::Tilde, Variant::Hat] {
                let frame = invariant_frame(&Splitting::from_group(g, v), &g.identity)?;
                for (a, f) in frame.iter().enumerate() {
                    sections.push(section(format!("{v} {}", a + 1), &f.comps, n, 1));
                }
            }
            Ok(render(
                "invariant frame through the identity basis",
                "[i] for the component along d/dx^i",
                sections,
            ))
        }
        Quantity::StructureConstants => {
            let c = match subject {
                Subject::Group(g) => structure_constants(
                    &invariant_frame(&Splitting::from_group(g, Variant::Tilde), &g.identity)?,
                    &g.identity,
                )?,
                Subject::Algebra { constants, .. } => constants.clone(),
                Subject::Splitting { .. } => {
                    return Err(DeriveError::Unsupported {
                        what: "structure-constants",
                        needs: "a group or an algebra",
                    })
                }
            };
            Ok(render(
                "structure constants",
                "[k,i,j] for [e_i, e_j] = c^k_{ij} e_k with i < j",
                vec![constants_section(&c)],
            ))
        }
        Quantity::EpsilonHat => {
            let (_, hat) = splitting_of(subject, "epsilon-hat")?;
            let hat = hat.ok_or(DeriveError::Unsupported {
                what: "epsilon-hat",
                needs: "a group",
            })?;
            let m = hat.between(&x_vars(n), &y_vars(n));
            let flat: Vec<Expr> = m.into_iter().flatten().collect();
            Ok(render(
                "hat splitting",
                "[i,j] for eps^i_j(x, y)",
                vec![section("hat", &flat, n, 2)],
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::from_builtin;

    #[test]
    fn heisenberg_quantities() {
        let h = from_builtin("heisenberg3").unwrap();
        let g = derive(&h, Quantity::Gamma).unwrap();
        assert_eq!(g.json["sections"]["tilde"].as_object().unwrap().len(), 1);
        let c = derive(&h, Quantity::StructureConstants).unwrap();
        assert_eq!(c.json["sections"]["structure constants"].as_object().unwrap().len(), 1);
        let curv = derive(&h, Quantity::Curvature).unwrap();
        assert!(curv.markdown.contains("all components vanish"));
        for name in Quantity::NAMES {
            assert!(derive(&h, Quantity::parse(name).unwrap()).is_ok(), "{name}");
        }
    }

    #[test]
    fn algebra_only_has_constants() {
        let s = from_builtin("sl2-constants").unwrap();
        assert!(derive(&s, Quantity::StructureConstants).is_ok());
        assert!(matches!(
            derive(&s, Quantity::Gamma),
            Err(DeriveError::Unsupported { .. })
        ));
    }
}
