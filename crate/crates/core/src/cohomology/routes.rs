//! The horizontal route: invariant forms, symbolic differentials, and
//! evaluation at a base point with unit fiber vectors.

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::expr::{Block, Evaluator, Expr, SamplePoint, VarRef};
use crate::forms::index::IndexSet;
use crate::forms::{
    box_linear, dhat, dtilde, extend_nonlinear, extend_on_t, linearize, FormOnT, Invariance, NonlinearForm,
};
use crate::geometry::{unflatten, Connection, GroupLaw, Splitting, Variant};
use crate::linalg::QMatrix;

use super::ce::{basis_labels, restrict, vector_labels};
use super::{top_degree, CoefficientModule, CohomologyError, LocalizedComplex};

/// Evaluates components (any layout) at `x = base` with slot `s` set to the
/// unit vector `e_{w_s}`, for every coefficient index `w`. Output index is
/// `component * dv + w`.
fn localize_coefficients(
    comps: &[Expr],
    base: &[BigRational],
    n: usize,
    slots: usize,
) -> Result<Vec<BigRational>, CohomologyError> {
    let dv = n.pow(slots as u32);
    let mut out = vec![BigRational::zero(); comps.len() * dv];
    for w in 0..dv {
        let digits = unflatten(w, n, slots);
        let mut p = SamplePoint::new();
        for (i, v) in base.iter().enumerate() {
            p.set(VarRef::x(i), v.clone());
        }
        for (s, &d) in digits.iter().enumerate() {
            for a in 0..n {
                let v = if a == d { 1 } else { 0 };
                p.set(VarRef::fiber(s as u8, a), BigRational::from_integer(v.into()));
            }
        }
        let mut ev = Evaluator::<BigRational>::new(&p);
        for (c, e) in comps.iter().enumerate() {
            out[c * dv + w] = ev.eval(e)?;
        }
    }
    Ok(out)
}

fn monomial(digits: &[usize]) -> Expr {
    Expr::product(
        digits
            .iter()
            .enumerate()
            .map(|(s, &a)| Expr::var(VarRef::fiber(s as u8, a))),
    )
}

/// Invariant basis form for the cochain `(I, w)`: the seed `e^I (x) w`
/// transported from `base` by the splitting `s`.
fn basis_form(s: &Splitting, base: &[BigRational], module: CoefficientModule, k: usize, col: usize) -> FormOnT {
    let n = s.dim;
    let dv = module.dim(n);
    let slots = module.slots();
    let set = IndexSet::new(n, k);
    let mut comps = vec![Expr::zero(); set.len()];
    comps[col / dv] = monomial(&unflatten(col % dv, n, slots.len()));
    extend_on_t(s, base, &FormOnT::new(n, k, slots, comps, true))
}

fn check_base(g: &GroupLaw, base: &[BigRational]) -> Result<(), CohomologyError> {
    let mut p = SamplePoint::new();
    for (i, v) in base.iter().enumerate() {
        p.set(VarRef::x(i), v.clone());
    }
    for c in &g.constraints {
        if c.eval_exact(&p)?.is_zero() {
            return Err(CohomologyError::Unsupported(format!(
                "base point violates the domain constraint {c} != 0"
            )));
        }
    }
    Ok(())
}

fn horizontal_full(
    g: &GroupLaw,
    module: CoefficientModule,
    max_k: usize,
    base: &[BigRational],
    extension: Variant,
) -> Result<(Vec<QMatrix>, Vec<Vec<String>>), CohomologyError> {
    check_base(g, base)?;
    let n = g.dim;
    let ext = Splitting::from_group(g, extension);
    let hat: Connection = Splitting::from_group(g, Variant::Hat).connection();
    let dv = module.dim(n);
    let slots = module.slots().len();
    let top = top_degree(n, max_k);
    let d = (0..top)
        .map(|k| {
            let cols = IndexSet::new(n, k).len() * dv;
            let rows = IndexSet::new(n, k + 1).len() * dv;
            let columns = (0..cols)
                .into_par_iter()
                .map(|col| {
                    let form = basis_form(&ext, base, module, k, col);
                    localize_coefficients(&dhat(&hat, &form).comps, base, n, slots)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(QMatrix::from_columns(rows, &columns))
        })
        .collect::<Result<Vec<_>, CohomologyError>>()?;
    let bases = (0..=top).map(|k| basis_labels(n, k, module)).collect();
    Ok((d, bases))
}

fn complex(
    label: &str,
    module: CoefficientModule,
    n: usize,
    max_k: usize,
    bases: Vec<Vec<String>>,
    d: Vec<QMatrix>,
) -> LocalizedComplex {
    LocalizedComplex {
        label: label.into(),
        coefficients: module.to_string(),
        bases,
        d,
        degrees: (max_k + 1).min(n + 1),
    }
}

/// Tilde-invariant linear forms with values in `module`, horizontal
/// differential, localized at `base`.
pub fn ilhc_matrices(
    g: &GroupLaw,
    module: CoefficientModule,
    max_k: usize,
    base: &[BigRational],
) -> Result<LocalizedComplex, CohomologyError> {
    let (d, bases) = horizontal_full(g, module, max_k, base, Variant::Tilde)?;
    Ok(complex("ilhc", module, g.dim, max_k, bases, d))
}

/// Hat-invariant linear forms: the fiber variables are parallel for the
/// differential, so this is one trivial complex per coefficient vector.
pub fn hat35_matrices(
    g: &GroupLaw,
    module: CoefficientModule,
    max_k: usize,
    base: &[BigRational],
) -> Result<LocalizedComplex, CohomologyError> {
    let (d, bases) = horizontal_full(g, module, max_k, base, Variant::Hat)?;
    Ok(complex("hat35", module, g.dim, max_k, bases, d))
}

/// Forms invariant under both structures: the tilde-invariant cochains
/// whose hat invariance operator vanishes at `base`, with the restricted
/// differential.
pub fn biinv36_matrices(
    g: &GroupLaw,
    module: CoefficientModule,
    max_k: usize,
    base: &[BigRational],
) -> Result<LocalizedComplex, CohomologyError> {
    let (full, _) = horizontal_full(g, module, max_k, base, Variant::Tilde)?;
    let n = g.dim;
    let tilde = Splitting::from_group(g, Variant::Tilde);
    let hat = Splitting::from_group(g, Variant::Hat).connection();
    let dv = module.dim(n);
    let slots = module.slots().len();
    let kernels = (0..=full.len())
        .map(|k| {
            let cols = IndexSet::new(n, k).len() * dv;
            let rows = n * IndexSet::new(n, k).len() * dv;
            let columns = (0..cols)
                .into_par_iter()
                .map(|col| {
                    let form = basis_form(&tilde, base, module, k, col);
                    localize_coefficients(&box_linear(&hat, &form), base, n, slots)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(QMatrix::from_columns(rows, &columns).kernel_basis())
        })
        .collect::<Result<Vec<_>, CohomologyError>>()?;
    let d = restrict(&full, &kernels)?;
    let bases = kernels.iter().map(|k| vector_labels(k)).collect();
    Ok(complex("biinv36", module, n, max_k, bases, d))
}

/// Row `m` of the invariant double complex: hat-invariant `m`-point forms
/// with the nonlinear differential, linearized at the identity. The basis
/// form for `(I, a_1..a_{m-1})` extends the seed
/// `prod_c (y_c^{a_c} - e^{a_c}) dx^I`, whose linearization is the
/// corresponding multilinear cochain.
pub fn ilhdc_row_matrices(g: &GroupLaw, m: usize, max_k: usize) -> Result<LocalizedComplex, CohomologyError> {
    if m == 0 {
        return Err(CohomologyError::Unsupported("rows start at one point copy".into()));
    }
    let n = g.dim;
    let base = g.identity.clone();
    let module = CoefficientModule::Power(m - 1);
    let dv = module.dim(n);
    let tilde = Splitting::from_group(g, Variant::Tilde);
    let e = g.identity_exprs();
    let top = top_degree(n, max_k);
    let d = (0..top)
        .map(|k| {
            let set = IndexSet::new(n, k);
            let rows = IndexSet::new(n, k + 1).len() * dv;
            let columns = (0..set.len() * dv)
                .into_par_iter()
                .map(|col| {
                    let digits = unflatten(col % dv, n, m - 1);
                    let mut comps = vec![Expr::zero(); set.len()];
                    comps[col / dv] = Expr::product(digits.iter().enumerate().map(|(c, &a)| {
                        let y = Expr::var(VarRef {
                            block: Block::Point(c as u8 + 1),
                            index: a,
                        });
                        Expr::sub(&y, &e[a])
                    }));
                    let seed = NonlinearForm::new(n, m, k, comps);
                    let w = dtilde(&tilde, &extend_nonlinear(g, Invariance::HAT, &seed));
                    let lin = if m == 1 { w.comps } else { linearize(&w).comps };
                    localize_coefficients(&lin, &base, n, m - 1)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(QMatrix::from_columns(rows, &columns))
        })
        .collect::<Result<Vec<_>, CohomologyError>>()?;
    let bases = (0..=top).map(|k| basis_labels(n, k, module)).collect();
    Ok(LocalizedComplex {
        label: format!("ilhdc-row:{m}"),
        coefficients: module.to_string(),
        bases,
        d,
        degrees: (max_k + 1).min(n + 1),
    })
}
