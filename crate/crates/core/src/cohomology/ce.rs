//! The Chevalley-Eilenberg oracle.
//!
//! `(d w)(x_0, .., x_k) = sum_{i<j} (-1)^{i+j} w([x_i, x_j], x_0, .. ^i .. ^j .., x_k)
//!                      + sum_i (-1)^i rho(x_i) w(x_0, .. ^i .., x_k)`
//!
//! Cochains of degree `k` are indexed by an increasing tuple `I` (outer,
//! lexicographic) and a coefficient basis vector (inner).

use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::StructureConstants;
use crate::forms::index::{label, IndexSet};
use crate::linalg::QMatrix;

use super::{top_degree, CoefficientModule, CohomologyError, LocalizedComplex};

pub(crate) fn basis_labels(n: usize, k: usize, module: CoefficientModule) -> Vec<String> {
    let v = module.basis_labels(n);
    IndexSet::new(n, k)
        .tuples
        .iter()
        .flat_map(|i| {
            let head = if i.is_empty() { "-".to_string() } else { label(i) };
            v.iter().map(move |w| format!("{head}|{w}"))
        })
        .collect()
}

fn add(m: &mut QMatrix, r: usize, c: usize, v: &BigRational) {
    let cur = m.get(r, c) + v;
    m.set(r, c, cur);
}

fn sign(p: usize) -> BigRational {
    BigRational::from_integer(if p.is_multiple_of(2) { 1 } else { -1 }.into())
}

fn differential(c: &StructureConstants, rho: &[QMatrix], dv: usize, k: usize) -> QMatrix {
    let n = c.dim;
    let src = IndexSet::new(n, k);
    let dst = IndexSet::new(n, k + 1);
    let mut m = QMatrix::zeros(dst.len() * dv, src.len() * dv);
    for (jpos, j) in dst.tuples.iter().enumerate() {
        for p in 0..j.len() {
            for q in p + 1..j.len() {
                let mut rest = j.clone();
                rest.remove(q);
                rest.remove(p);
                for a in 0..n {
                    let cij = c.get(a, j[p], j[q]);
                    if cij.is_zero() {
                        continue;
                    }
                    let mut idx = vec![a];
                    idx.extend(&rest);
                    let Some((s, ipos)) = src.signed_position(&idx) else {
                        continue;
                    };
                    let coeff = sign(p + q) * cij * BigRational::from_integer(s.into());
                    for w in 0..dv {
                        add(&mut m, jpos * dv + w, ipos * dv + w, &coeff);
                    }
                }
            }
            let mut rest = j.clone();
            rest.remove(p);
            let ipos = src.position(&rest).expect("sorted");
            let sg = sign(p);
            for w in 0..dv {
                for v in 0..dv {
                    let r = rho[j[p]].get(w, v);
                    if !r.is_zero() {
                        add(&mut m, jpos * dv + w, ipos * dv + v, &(&sg * r));
                    }
                }
            }
        }
    }
    m
}

fn checked_action(c: &StructureConstants, module: CoefficientModule) -> Result<Vec<QMatrix>, CohomologyError> {
    c.validate()?;
    if !module.is_representation(c) {
        return Err(CohomologyError::NotRepresentation);
    }
    Ok(module.action(c))
}

/// Chevalley-Eilenberg differentials reporting degrees `0..=max_k`.
pub fn ce_matrices(
    c: &StructureConstants,
    module: CoefficientModule,
    max_k: usize,
) -> Result<LocalizedComplex, CohomologyError> {
    let n = c.dim;
    let rho = checked_action(c, module)?;
    let dv = module.dim(n);
    let top = top_degree(n, max_k);
    let d = (0..top).map(|k| differential(c, &rho, dv, k)).collect();
    Ok(LocalizedComplex {
        label: "ce".into(),
        coefficients: module.to_string(),
        bases: (0..=top).map(|k| basis_labels(n, k, module)).collect(),
        d,
        degrees: (max_k + 1).min(n + 1),
    })
}

/// Trivial-coefficient differentials repeated over `copies` coefficient
/// basis vectors (inner index).
pub fn trivial_copies(
    c: &StructureConstants,
    copies: usize,
    max_k: usize,
) -> Result<LocalizedComplex, CohomologyError> {
    let base = ce_matrices(c, CoefficientModule::Trivial, max_k)?;
    let d = base
        .d
        .iter()
        .map(|m| {
            let mut out = QMatrix::zeros(m.rows() * copies, m.cols() * copies);
            for r in 0..m.rows() {
                for col in 0..m.cols() {
                    for v in 0..copies {
                        out.set(r * copies + v, col * copies + v, m.get(r, col).clone());
                    }
                }
            }
            out
        })
        .collect();
    let bases = base
        .bases
        .iter()
        .map(|b| {
            b.iter()
                .flat_map(|l| (1..=copies).map(move |v| format!("{l}#{v}")))
                .collect()
        })
        .collect();
    Ok(LocalizedComplex {
        label: "ce-copies".into(),
        coefficients: format!("trivial^{copies}"),
        bases,
        d,
        degrees: base.degrees,
    })
}

/// The action of `e_x` on degree-`k` cochains:
/// `(theta_x w)(y..) = rho(x) w(y..) - sum_p w(.., [x, y_p], ..)`.
pub fn lie_derivative_matrices(
    c: &StructureConstants,
    module: CoefficientModule,
    k: usize,
) -> Result<Vec<QMatrix>, CohomologyError> {
    let n = c.dim;
    let rho = checked_action(c, module)?;
    let dv = module.dim(n);
    let set = IndexSet::new(n, k);
    Ok((0..n)
        .map(|x| {
            let mut m = QMatrix::zeros(set.len() * dv, set.len() * dv);
            for (ipos, i) in set.tuples.iter().enumerate() {
                for w in 0..dv {
                    for v in 0..dv {
                        let r = rho[x].get(w, v);
                        if !r.is_zero() {
                            add(&mut m, ipos * dv + w, ipos * dv + v, r);
                        }
                    }
                }
                for p in 0..i.len() {
                    for a in 0..n {
                        let cxa = c.get(a, x, i[p]);
                        if cxa.is_zero() {
                            continue;
                        }
                        let mut moved = i.clone();
                        moved[p] = a;
                        let Some((s, jpos)) = set.signed_position(&moved) else {
                            continue;
                        };
                        let coeff = -(cxa * BigRational::from_integer(s.into()));
                        for w in 0..dv {
                            add(&mut m, ipos * dv + w, jpos * dv + w, &coeff);
                        }
                    }
                }
            }
            m
        })
        .collect())
}

fn stack(blocks: &[QMatrix]) -> QMatrix {
    let cols = blocks.first().map_or(0, QMatrix::cols);
    let rows: Vec<Vec<BigRational>> = blocks
        .iter()
        .flat_map(|b| (0..b.rows()).map(|r| b.row(r).to_vec()))
        .collect();
    if rows.is_empty() {
        return QMatrix::zeros(0, cols);
    }
    QMatrix::from_rows(rows)
}

pub(crate) fn kernel_of_stack(blocks: &[QMatrix], cols: usize) -> Vec<Vec<BigRational>> {
    let s = stack(blocks);
    if s.rows() == 0 {
        return (0..cols)
            .map(|j| {
                (0..cols)
                    .map(|i| {
                        if i == j {
                            num_traits::One::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
    }
    s.kernel_basis()
}

/// Restricts full differentials to subspaces spanned by `kernels[k]`
/// (vectors in the full degree-`k` coordinates).
pub(crate) fn restrict(d: &[QMatrix], kernels: &[Vec<Vec<BigRational>>]) -> Result<Vec<QMatrix>, CohomologyError> {
    d.iter()
        .enumerate()
        .map(|(k, dk)| {
            let src = &kernels[k];
            let dst = &kernels[k + 1];
            let images: Vec<Vec<BigRational>> = src
                .iter()
                .map(|v| {
                    let col = dk.mul(&QMatrix::from_columns(v.len(), std::slice::from_ref(v)));
                    col.column(0)
                })
                .collect();
            if dst.is_empty() {
                if images.iter().flatten().any(|v| !v.is_zero()) {
                    return Err(CohomologyError::NotPreserved(k));
                }
                return Ok(QMatrix::zeros(0, src.len()));
            }
            let basis = QMatrix::from_columns(dk.rows(), dst);
            if src.is_empty() {
                return Ok(QMatrix::zeros(dst.len(), 0));
            }
            basis
                .solve(&QMatrix::from_columns(dk.rows(), &images))
                .ok_or(CohomologyError::NotPreserved(k))
        })
        .collect()
}

pub(crate) fn vector_labels(vs: &[Vec<BigRational>]) -> Vec<String> {
    (1..=vs.len()).map(|i| format!("v{i}")).collect()
}

/// The subcomplex of cochains annihilated by every `theta_x`.
pub fn ce_invariant_matrices(
    c: &StructureConstants,
    module: CoefficientModule,
    max_k: usize,
) -> Result<LocalizedComplex, CohomologyError> {
    let full = ce_matrices(c, module, max_k)?;
    let kernels: Vec<Vec<Vec<BigRational>>> = (0..full.bases.len())
        .map(|k| {
            Ok(kernel_of_stack(
                &lie_derivative_matrices(c, module, k)?,
                full.bases[k].len(),
            ))
        })
        .collect::<Result<_, CohomologyError>>()?;
    let d = restrict(&full.d, &kernels)?;
    Ok(LocalizedComplex {
        label: "ce-invariant".into(),
        coefficients: module.to_string(),
        bases: kernels.iter().map(|k| vector_labels(k)).collect(),
        d,
        degrees: full.degrees,
    })
}
