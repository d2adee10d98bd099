use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::StructureConstants;
use crate::forms::SlotKind;
use crate::linalg::QMatrix;

/// Coefficients of a cochain complex. A tensor module of type `(r, s)` is
/// represented by forms linear in `r` covector slots followed by `s`
/// vector slots; its basis is ordered lexicographically over the slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientModule {
    Trivial,
    Adjoint,
    Coadjoint,
    Tensor {
        upper: usize,
        lower: usize,
    },
    /// `M`-fold tensor power of the coadjoint module.
    Power(usize),
}

impl CoefficientModule {
    /// `(upper, lower)` tensor type.
    pub fn tensor_type(self) -> (usize, usize) {
        match self {
            CoefficientModule::Trivial => (0, 0),
            CoefficientModule::Adjoint => (1, 0),
            CoefficientModule::Coadjoint => (0, 1),
            CoefficientModule::Tensor { upper, lower } => (upper, lower),
            CoefficientModule::Power(m) => (0, m),
        }
    }

    pub fn slots(self) -> Vec<SlotKind> {
        let (r, s) = self.tensor_type();
        std::iter::repeat_n(SlotKind::Covector, r)
            .chain(std::iter::repeat_n(SlotKind::Vector, s))
            .collect()
    }

    pub fn dim(self, n: usize) -> usize {
        let (r, s) = self.tensor_type();
        n.pow((r + s) as u32)
    }

    /// Matrices of `rho(e_i)`: the adjoint action on covector slots and the
    /// coadjoint action `-ad^T` on vector slots, summed over slots.
    pub fn action(self, c: &StructureConstants) -> Vec<QMatrix> {
        let n = c.dim;
        let ad = c.adjoint();
        let slots = self.slots();
        let dim = self.dim(n);
        (0..n)
            .map(|i| {
                let mut m = QMatrix::zeros(dim, dim);
                for col in 0..dim {
                    let digits = crate::geometry::unflatten(col, n, slots.len());
                    for (s, kind) in slots.iter().enumerate() {
                        for a in 0..n {
                            let v = match kind {
                                SlotKind::Covector => ad[i].get(a, digits[s]).clone(),
                                SlotKind::Vector => -ad[i].get(digits[s], a).clone(),
                            };
                            if v.is_zero() {
                                continue;
                            }
                            let mut moved = digits.clone();
                            moved[s] = a;
                            let row = crate::geometry::flatten_index(&moved, n);
                            let cur: BigRational = m.get(row, col) + v;
                            m.set(row, col, cur);
                        }
                    }
                }
                m
            })
            .collect()
    }

    /// `rho([e_i, e_j]) = [rho(e_i), rho(e_j)]` for all basis pairs.
    pub fn is_representation(self, c: &StructureConstants) -> bool {
        let n = c.dim;
        let rho = self.action(c);
        let dim = self.dim(n);
        for i in 0..n {
            for j in 0..n {
                let comm = rho[i].mul(&rho[j]).sub(&rho[j].mul(&rho[i]));
                let mut br = QMatrix::zeros(dim, dim);
                for k in 0..n {
                    let ck = c.get(k, i, j);
                    if ck.is_zero() {
                        continue;
                    }
                    for r in 0..dim {
                        for s in 0..dim {
                            let v = br.get(r, s) + ck * rho[k].get(r, s);
                            br.set(r, s, v);
                        }
                    }
                }
                if comm != br {
                    return false;
                }
            }
        }
        true
    }

    /// Basis labels such as `e1`, `e^2`, `e1*e^3`.
    pub fn basis_labels(self, n: usize) -> Vec<String> {
        let slots = self.slots();
        if slots.is_empty() {
            return vec!["1".into()];
        }
        (0..self.dim(n))
            .map(|f| {
                let digits = crate::geometry::unflatten(f, n, slots.len());
                slots
                    .iter()
                    .zip(&digits)
                    .map(|(kind, d)| match kind {
                        SlotKind::Covector => format!("e{}", d + 1),
                        SlotKind::Vector => format!("e^{}", d + 1),
                    })
                    .collect::<Vec<_>>()
                    .join("*")
            })
            .collect()
    }
}

impl fmt::Display for CoefficientModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientModule::Trivial => f.write_str("trivial"),
            CoefficientModule::Adjoint => f.write_str("adjoint"),
            CoefficientModule::Coadjoint => f.write_str("coadjoint"),
            CoefficientModule::Tensor { upper, lower } => write!(f, "tensor:{upper},{lower}"),
            CoefficientModule::Power(m) => write!(f, "power:{m}"),
        }
    }
}

impl FromStr for CoefficientModule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad =
            || format!("unknown coefficients '{s}' (expected trivial, adjoint, coadjoint, tensor:R,S or power:M)");
        match s {
            "trivial" => Ok(CoefficientModule::Trivial),
            "adjoint" => Ok(CoefficientModule::Adjoint),
            "coadjoint" => Ok(CoefficientModule::Coadjoint),
            _ => {
                if let Some(rest) = s.strip_prefix("tensor:") {
                    let (r, t) = rest.split_once(',').ok_or_else(bad)?;
                    let upper = r.trim().parse().map_err(|_| bad())?;
                    let lower = t.trim().parse().map_err(|_| bad())?;
                    Ok(CoefficientModule::Tensor { upper, lower })
                } else if let Some(m) = s.strip_prefix("power:") {
                    Ok(CoefficientModule::Power(m.trim().parse().map_err(|_| bad())?))
                } else {
                    Err(bad())
                }
            }
        }
    }
}
