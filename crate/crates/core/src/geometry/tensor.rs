use crate::expr::{Expr, VarRef};

/// Components of a type `(upper, lower)` tensor in coordinates, flattened
/// row-major over the index list `upper..., lower...`. Components are
/// expressions in block `x`, or in several point blocks for two-point
/// tensors.
#[derive(Clone, Debug)]
pub struct TensorField {
    pub dim: usize,
    pub upper: usize,
    pub lower: usize,
    pub comps: Vec<Expr>,
}

/// Decodes a flat index into `rank` digits base `dim`, most significant first.
pub fn unflatten(mut flat: usize, dim: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in idx.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
    idx
}

pub fn flatten_index(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

impl TensorField {
    pub fn new(dim: usize, upper: usize, lower: usize, comps: Vec<Expr>) -> Self {
        assert_eq!(comps.len(), dim.pow((upper + lower) as u32), "component count");
        TensorField {
            dim,
            upper,
            lower,
            comps,
        }
    }

    pub fn zero(dim: usize, upper: usize, lower: usize) -> Self {
        Self::new(dim, upper, lower, vec![Expr::zero(); dim.pow((upper + lower) as u32)])
    }

    pub fn vector(comps: Vec<Expr>) -> Self {
        let n = comps.len();
        Self::new(n, 1, 0, comps)
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comps[flatten_index(idx, self.dim)]
    }

    fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.comps.len()).map(|f| unflatten(f, self.dim, self.rank()))
    }

    /// Componentwise map, keeping the type.
    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> TensorField {
        TensorField {
            comps: self.comps.iter().map(f).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &TensorField) -> TensorField {
        assert_eq!((self.upper, self.lower), (other.upper, other.lower));
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| Expr::add(a, b))
            .collect();
        TensorField { comps, ..self.clone() }
    }

    pub fn sub(&self, other: &TensorField) -> TensorField {
        assert_eq!((self.upper, self.lower), (other.upper, other.lower));
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| Expr::sub(a, b))
            .collect();
        TensorField { comps, ..self.clone() }
    }

    pub fn scale(&self, c: &Expr) -> TensorField {
        self.map(|e| Expr::mul(c, e))
    }

    /// Tensor product; the result lists the upper indices of `self`, then of
    /// `other`, then the lower indices of `self`, then of `other`.
    pub fn tensor(&self, other: &TensorField) -> TensorField {
        let n = self.dim;
        let (u1, l1, u2) = (self.upper, self.lower, other.upper);
        let upper = u1 + u2;
        let lower = l1 + other.lower;
        let rank = upper + lower;
        let comps = (0..n.pow(rank as u32))
            .map(|f| {
                let idx = unflatten(f, n, rank);
                let a: Vec<usize> = idx[..u1].iter().chain(&idx[upper..upper + l1]).copied().collect();
                let b: Vec<usize> = idx[u1..upper].iter().chain(&idx[upper + l1..]).copied().collect();
                Expr::mul(self.get(&a), other.get(&b))
            })
            .collect();
        TensorField::new(n, upper, lower, comps)
    }

    /// Partial derivatives in block `x`, derivative index appended last.
    pub fn gradient(&self) -> TensorField {
        let n = self.dim;
        let comps = self
            .comps
            .iter()
            .flat_map(|c| (0..n).map(move |r| c.diff(VarRef::x(r))))
            .collect();
        TensorField::new(n, self.upper, self.lower + 1, comps)
    }

    /// Contracts the last lower index with the vector `v`.
    pub fn contract_last(&self, v: &[Expr]) -> TensorField {
        assert!(self.lower >= 1);
        let n = self.dim;
        let comps = self
            .comps
            .chunks(n)
            .map(|chunk| Expr::sum(chunk.iter().zip(v).map(|(a, b)| Expr::mul(a, b))))
            .collect();
        TensorField::new(n, self.upper, self.lower - 1, comps)
    }
}

/// Connection coefficients `Gamma^i_{jk}`, flattened `[i][j][k]`.
#[derive(Clone, Debug)]
pub struct Connection {
    pub dim: usize,
    pub gamma: Vec<Expr>,
}

impl Connection {
    pub fn new(dim: usize, gamma: Vec<Expr>) -> Self {
        assert_eq!(gamma.len(), dim * dim * dim);
        Connection { dim, gamma }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// Coefficients with the two lower indices exchanged.
    pub fn swapped(&self) -> Connection {
        let n = self.dim;
        let mut gamma = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    gamma.push(self.get(i, k, j).clone());
                }
            }
        }
        Connection::new(n, gamma)
    }

    /// `T^i_{jk} = Gamma^i_{jk} - Gamma^i_{kj}`.
    pub fn torsion(&self) -> TensorField {
        let n = self.dim;
        let mut comps = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    comps.push(Expr::sub(self.get(i, j, k), self.get(i, k, j)));
                }
            }
        }
        TensorField::new(n, 1, 2, comps)
    }

    /// Linear integrability tensor, layout `[a][s][r][b]`:
    /// `d_s G^a_{rb} - d_r G^a_{sb} + G^c_{sb} G^a_{rc} - G^c_{rb} G^a_{sc}`.
    pub fn curvature(&self) -> TensorField {
        let n = self.dim;
        let half = |a: usize, s: usize, r: usize, b: usize| {
            Expr::sum(
                std::iter::once(self.get(a, r, b).diff(VarRef::x(s)))
                    .chain((0..n).map(|c| Expr::mul(self.get(c, s, b), self.get(a, r, c)))),
            )
        };
        let mut comps = Vec::with_capacity(n.pow(4));
        for a in 0..n {
            for s in 0..n {
                for r in 0..n {
                    for b in 0..n {
                        comps.push(Expr::sub(&half(a, s, r, b), &half(a, r, s, b)));
                    }
                }
            }
        }
        TensorField::new(n, 1, 3, comps)
    }

    /// Covariant derivative, derivative index appended last. Upper indices
    /// get `-Gamma^i_{ra} T^a`, lower indices `+Gamma^b_{rj} T_b`.
    pub fn covariant_derivative(&self, t: &TensorField) -> TensorField {
        let n = self.dim;
        assert_eq!(t.dim, n);
        let rank = t.rank();
        let mut comps = Vec::with_capacity(t.comps.len() * n);
        for idx in t.indices() {
            let base = t.get(&idx);
            for r in 0..n {
                let mut terms = vec![base.diff(VarRef::x(r))];
                let mut moved = idx.clone();
                for p in 0..rank {
                    let orig = idx[p];
                    for a in 0..n {
                        moved[p] = a;
                        let comp = t.get(&moved);
                        if comp.is_zero() {
                            continue;
                        }
                        if p < t.upper {
                            let g = self.get(orig, r, a);
                            if !g.is_zero() {
                                terms.push(Expr::mul(g, comp).neg());
                            }
                        } else {
                            let g = self.get(a, r, orig);
                            if !g.is_zero() {
                                terms.push(Expr::mul(g, comp));
                            }
                        }
                    }
                    moved[p] = orig;
                }
                comps.push(Expr::sum(terms));
            }
        }
        TensorField::new(n, t.upper, t.lower + 1, comps)
    }

    /// Covariant derivative along `v`: `v^r (nabla T)_{..., r}`.
    pub fn directional(&self, t: &TensorField, v: &[Expr]) -> TensorField {
        self.covariant_derivative(t).contract_last(v)
    }
}

/// Lie derivative of `t` along the vector field `x`:
/// `X^a d_a T - sum_upper T^{..a..} d_a X^i + sum_lower T_{..a..} d_j X^a`.
pub fn lie_derivative(x: &TensorField, t: &TensorField) -> TensorField {
    assert_eq!((x.upper, x.lower), (1, 0), "Lie derivative needs a vector field");
    let n = t.dim;
    let rank = t.rank();
    let dx: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|a| x.comps[i].diff(VarRef::x(a))).collect())
        .collect();
    let comps = t
        .indices()
        .map(|idx| {
            let mut terms: Vec<Expr> = (0..n)
                .map(|a| Expr::mul(&x.comps[a], &t.get(&idx).diff(VarRef::x(a))))
                .collect();
            let mut moved = idx.clone();
            for p in 0..rank {
                let orig = idx[p];
                for a in 0..n {
                    moved[p] = a;
                    let comp = t.get(&moved);
                    if p < t.upper {
                        terms.push(Expr::mul(comp, &dx[orig][a]).neg());
                    } else {
                        terms.push(Expr::mul(comp, &dx[a][orig]));
                    }
                }
                moved[p] = orig;
            }
            Expr::sum(terms)
        })
        .collect();
    TensorField::new(n, t.upper, t.lower, comps)
}

/// Lie bracket of vector fields, `[X, Y] = L_X Y`.
pub fn lie_bracket(x: &TensorField, y: &TensorField) -> TensorField {
    lie_derivative(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::expr::identity::{check_zero_all, equiv_components, IdentityConfig, Verdict};
    use crate::expr::{parse, ParseContext};
    use crate::forms::random::random_tensor;
    use crate::geometry::splitting::{Splitting, Variant};

    fn cfg() -> IdentityConfig {
        IdentityConfig::default()
    }

    fn p(s: &str, n: usize) -> Expr {
        parse(s, &ParseContext::new(n, 1)).unwrap()
    }

    fn equal(a: &TensorField, b: &TensorField, dom: &[Expr]) -> Verdict {
        equiv_components(&a.comps, &b.comps, dom, &cfg())
    }

    #[test]
    fn heisenberg_connection_and_torsion() {
        let g = builtins::group("heisenberg3").unwrap();
        let c = Splitting::from_group(&g, Variant::Tilde).connection();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let want = if (i, j, k) == (2, 0, 1) {
                        Expr::one()
                    } else {
                        Expr::zero()
                    };
                    assert_eq!(
                        equiv_components(&[c.get(i, j, k).clone()], &[want], &[], &cfg()),
                        Verdict::Equal
                    );
                }
            }
        }
        let t = c.torsion();
        assert!(t.get(&[2, 0, 1]).is_one());
        assert_eq!(t.get(&[2, 1, 0]).to_string(), "-1");
    }

    #[test]
    fn affine_connection() {
        let g = builtins::group("affine2").unwrap();
        let c = Splitting::from_group(&g, Variant::Tilde).connection();
        let inv = p("1/x1", 2);
        let want: Vec<Expr> = (0..8)
            .map(|f| if f == 0 || f == 5 { inv.clone() } else { Expr::zero() })
            .collect();
        assert_eq!(equiv_components(&c.gamma, &want, &g.domain(1), &cfg()), Verdict::Equal);
        let t = c.torsion();
        assert_eq!(
            equiv_components(&[t.get(&[1, 0, 1]).clone()], &[inv], &g.domain(1), &cfg()),
            Verdict::Equal
        );
    }

    #[test]
    fn flat_coordinate_derivative() {
        let c = Connection::new(2, vec![Expr::zero(); 8]);
        let form = TensorField::new(2, 0, 1, vec![Expr::zero(), p("x1", 2)]);
        let d = c.covariant_derivative(&form);
        let nonzero: Vec<usize> = (0..4).filter(|&f| !d.comps[f].is_zero()).collect();
        assert_eq!(nonzero, vec![2]);
        assert!(d.comps[2].is_one());
    }

    #[test]
    fn hand_made_curvature_is_nonzero() {
        let mut gamma = vec![Expr::zero(); 8];
        gamma[0] = p("x2", 2);
        let r = Connection::new(2, gamma).curvature();
        assert!(check_zero_all(&r.comps, &[], &cfg()).witness().is_some());
    }

    #[test]
    fn lie_derivative_examples() {
        let x = TensorField::vector(vec![Expr::one(), Expr::zero()]);
        let y = TensorField::vector(vec![Expr::zero(), p("x1", 2)]);
        let l = lie_derivative(&x, &y);
        assert!(l.comps[0].is_zero());
        assert!(l.comps[1].is_one());
    }

    #[test]
    fn leibniz_rule_for_covariant_derivative() {
        let g = builtins::group("affine2").unwrap();
        let c = Splitting::from_group(&g, Variant::Tilde).connection();
        let a = random_tensor(2, 1, 0, 1);
        let b = random_tensor(2, 0, 1, 2);
        let lhs = c.covariant_derivative(&a.tensor(&b));
        // nabla(a x b) = (nabla a) x b + a x (nabla b), with the derivative
        // index moved to the end in the first term.
        let da = c.covariant_derivative(&a);
        let db = c.covariant_derivative(&b);
        let n = 2;
        let mut comps = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for r in 0..n {
                    comps.push(Expr::add(
                        &Expr::mul(da.get(&[i, r]), b.get(&[j])),
                        &Expr::mul(a.get(&[i]), db.get(&[j, r])),
                    ));
                }
            }
        }
        let rhs = TensorField::new(n, 1, 2, comps);
        assert_eq!(equal(&lhs, &rhs, &g.domain(1)), Verdict::Equal);
    }

    #[test]
    fn lie_derivative_of_bracket() {
        let n = 2;
        let x = random_tensor(n, 1, 0, 3);
        let y = random_tensor(n, 1, 0, 4);
        let t = random_tensor(n, 1, 1, 5);
        let lhs = lie_derivative(&lie_bracket(&x, &y), &t);
        let rhs = lie_derivative(&x, &lie_derivative(&y, &t)).sub(&lie_derivative(&y, &lie_derivative(&x, &t)));
        assert_eq!(equal(&lhs, &rhs, &[]), Verdict::Equal);
    }
}
