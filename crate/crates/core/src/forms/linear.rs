//! Horizontal forms over the tangent bundle and their operators.

use num_rational::BigRational;

use crate::expr::identity::{check_zero_all, IdentityConfig, Verdict};
use crate::expr::{blocks_map, Block, Expr, VarRef};
use crate::geometry::{constants, x_vars, Connection, Matrix, Splitting};

use super::index::{binomial, IndexSet};

/// What a fiber coordinate stands for. A form that is linear in a `Vector`
/// slot takes covector values there; linear in a `Covector` slot, vector
/// values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotKind {
    Vector,
    Covector,
}

/// A k-form depending on a point `x` and fiber coordinates, one block per
/// slot (`Block::Fiber(s)`). Components are stored for increasing index
/// tuples in lexicographic order.
#[derive(Clone, Debug)]
pub struct FormOnT {
    pub dim: usize,
    pub degree: usize,
    pub slots: Vec<SlotKind>,
    pub comps: Vec<Expr>,
    /// Set when every component is linear in each slot.
    pub linear: bool,
}

pub fn fiber_vars(slot: usize, dim: usize) -> Vec<Expr> {
    (0..dim).map(|i| Expr::var(VarRef::fiber(slot as u8, i))).collect()
}

impl FormOnT {
    pub fn new(dim: usize, degree: usize, slots: Vec<SlotKind>, comps: Vec<Expr>, linear: bool) -> Self {
        assert_eq!(comps.len(), binomial(dim, degree), "component count");
        FormOnT {
            dim,
            degree,
            slots,
            comps,
            linear,
        }
    }

    pub fn zero(dim: usize, degree: usize, slots: Vec<SlotKind>) -> Self {
        Self::new(dim, degree, slots, vec![Expr::zero(); binomial(dim, degree)], true)
    }

    pub fn indices(&self) -> IndexSet {
        IndexSet::new(self.dim, self.degree)
    }

    /// The component for an arbitrary index list, with alternating sign.
    pub fn component(&self, idx: &[usize], set: &IndexSet) -> Expr {
        match set.signed_position(idx) {
            Some((1, p)) => self.comps[p].clone(),
            Some((_, p)) => self.comps[p].neg(),
            None => Expr::zero(),
        }
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> FormOnT {
        FormOnT {
            comps: self.comps.iter().map(f).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &FormOnT) -> FormOnT {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| Expr::sub(a, b))
            .collect();
        FormOnT {
            comps,
            linear: self.linear && other.linear,
            ..self.clone()
        }
    }

    /// Euler relation per slot: `sum_a f^a dF/df^a - F` for every component
    /// and slot. All vanish iff the form is linear in each slot.
    pub fn euler_defects(&self) -> Vec<Expr> {
        let mut out = Vec::new();
        for s in 0..self.slots.len() {
            let f = fiber_vars(s, self.dim);
            for c in &self.comps {
                let euler = Expr::sum((0..self.dim).map(|a| Expr::mul(&f[a], &c.diff(VarRef::fiber(s as u8, a)))));
                out.push(Expr::sub(&euler, c));
            }
        }
        out
    }

    pub fn check_multilinear(&self, constraints: &[Expr], cfg: &IdentityConfig) -> Verdict {
        check_zero_all(&self.euler_defects(), constraints, cfg)
    }
}

/// Fiber velocities of the total derivative: for each direction `r` and
/// slot `s`, the vector `w` with `D_r = d/dx^r + sum_s w^a d/df_s^a`.
fn fiber_velocities(conn: &Connection, slots: &[SlotKind]) -> Vec<Vec<Vec<Expr>>> {
    let n = conn.dim;
    (0..n)
        .map(|r| {
            slots
                .iter()
                .enumerate()
                .map(|(s, kind)| {
                    let f = fiber_vars(s, n);
                    (0..n)
                        .map(|a| match kind {
                            SlotKind::Vector => Expr::sum((0..n).map(|b| Expr::mul(conn.get(a, r, b), &f[b]))),
                            SlotKind::Covector => Expr::sum((0..n).map(|b| Expr::mul(conn.get(b, r, a), &f[b]))).neg(),
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn total_derivative(e: &Expr, r: usize, velocities: &[Vec<Vec<Expr>>]) -> Expr {
    let mut terms = vec![e.diff(VarRef::x(r))];
    for (s, w) in velocities[r].iter().enumerate() {
        for (a, wa) in w.iter().enumerate() {
            let d = e.diff(VarRef::fiber(s as u8, a));
            if !d.is_zero() && !wa.is_zero() {
                terms.push(Expr::mul(&d, wa));
            }
        }
    }
    Expr::sum(terms)
}

/// Total derivative `D_r` of every component, layout `[r][I]`. Vector
/// slots move by `Gamma^a_{rb} f^b`, covector slots by `-Gamma^b_{ra} f_b`.
pub fn total_derivatives(conn: &Connection, form: &FormOnT) -> Vec<Expr> {
    let v = fiber_velocities(conn, &form.slots);
    (0..form.dim)
        .flat_map(|r| {
            form.comps
                .iter()
                .map(|c| total_derivative(c, r, &v))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Horizontal differential: the alternation of the total derivative,
/// `(dF)_J = sum_p (-1)^p D_{j_p} F_{J without j_p}`.
pub fn dhat(conn: &Connection, form: &FormOnT) -> FormOnT {
    let n = form.dim;
    let k = form.degree;
    let src = form.indices();
    let dst = IndexSet::new(n, k + 1);
    let d = total_derivatives(conn, form);
    let nk = src.len();
    let comps = dst
        .tuples
        .iter()
        .map(|j| {
            Expr::sum((0..=k).map(|p| {
                let mut rest = j.clone();
                let r = rest.remove(p);
                let pos = src.position(&rest).expect("sorted subtuple");
                let term = d[r * nk + pos].clone();
                if p % 2 == 0 {
                    term
                } else {
                    term.neg()
                }
            }))
        })
        .collect();
    FormOnT::new(n, k + 1, form.slots.clone(), comps, form.linear)
}

/// Invariance operator with respect to the splitting whose connection is
/// `conn`: `D_r F_I + sum_p Gamma^a_{r i_p} F_{i_1..a..i_k}`, layout `[r][I]`.
/// It vanishes exactly on the forms preserved by the splitting's transport.
pub fn box_linear(conn: &Connection, form: &FormOnT) -> Vec<Expr> {
    let n = form.dim;
    let set = form.indices();
    let d = total_derivatives(conn, form);
    let nk = set.len();
    let mut out = Vec::with_capacity(n * nk);
    for r in 0..n {
        for (pos, idx) in set.tuples.iter().enumerate() {
            let mut terms = vec![d[r * nk + pos].clone()];
            for p in 0..idx.len() {
                for a in 0..n {
                    let g = conn.get(a, r, idx[p]);
                    if g.is_zero() {
                        continue;
                    }
                    let mut moved = idx.clone();
                    moved[p] = a;
                    let c = form.component(&moved, &set);
                    if !c.is_zero() {
                        terms.push(Expr::mul(g, &c));
                    }
                }
            }
            out.push(Expr::sum(terms));
        }
    }
    out
}

/// Pull-back of alternating components by the linear map `f` (`f[a][i]`,
/// source index `i`): `sum_A comps_A det f[A][I]`.
pub fn pullback(comps: &[Expr], f: &Matrix, dim: usize, degree: usize) -> Vec<Expr> {
    let set = IndexSet::new(dim, degree);
    set.tuples
        .iter()
        .map(|i| {
            Expr::sum(
                set.tuples
                    .iter()
                    .zip(comps)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(a, c)| {
                        let minor: Matrix = a
                            .iter()
                            .map(|&row| i.iter().map(|&col| f[row][col].clone()).collect())
                            .collect();
                        Expr::mul(c, &determinant(&minor))
                    }),
            )
        })
        .collect()
}

/// Laplace expansion along the first row; sizes here are at most four.
pub fn determinant(m: &Matrix) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        n => Expr::sum((0..n).filter(|&j| !m[0][j].is_zero()).map(|j| {
            let minor: Matrix = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, e)| e.clone())
                        .collect()
                })
                .collect();
            let t = Expr::mul(&m[0][j], &determinant(&minor));
            if j % 2 == 0 {
                t
            } else {
                t.neg()
            }
        })),
    }
}

/// Extends a seed at `base` (components in the fiber blocks only) to the
/// form invariant under the transport of `s`:
/// `F(x, f) = eps(x, base)^* seed(eps(x, base) f)`, with covector slots
/// transported by the inverse transpose.
pub fn extend_on_t(s: &Splitting, base: &[BigRational], seed: &FormOnT) -> FormOnT {
    let n = s.dim;
    let x = x_vars(n);
    let e = constants(base);
    let to_base = s.between(&x, &e);
    let from_base = s.between(&e, &x);
    let transported: Vec<Vec<Expr>> = seed
        .slots
        .iter()
        .enumerate()
        .map(|(slot, kind)| {
            let f = fiber_vars(slot, n);
            (0..n)
                .map(|a| match kind {
                    SlotKind::Vector => Expr::sum((0..n).map(|b| Expr::mul(&to_base[a][b], &f[b]))),
                    SlotKind::Covector => Expr::sum((0..n).map(|b| Expr::mul(&f[b], &from_base[b][a]))),
                })
                .collect()
        })
        .collect();
    let assignments: Vec<(Block, &[Expr])> = transported
        .iter()
        .enumerate()
        .map(|(slot, v)| (Block::Fiber(slot as u8), v.as_slice()))
        .collect();
    let map = blocks_map(&assignments);
    let moved: Vec<Expr> = seed.comps.iter().map(|c| c.subst(&map)).collect();
    let comps = pullback(&moved, &to_base, n, seed.degree);
    FormOnT::new(n, seed.degree, seed.slots.clone(), comps, seed.linear)
}

/// Restricts a form to `x = base`.
pub fn localize(form: &FormOnT, base: &[BigRational]) -> FormOnT {
    let e = constants(base);
    let map = blocks_map(&[(Block::Point(0), e.as_slice())]);
    form.map(|c| c.subst(&map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::expr::identity::equiv_components;
    use crate::expr::{parse, ParseContext};
    use crate::forms::random::{random_form_on_t, random_seed_on_t};
    use crate::geometry::Variant;

    fn cfg() -> IdentityConfig {
        IdentityConfig::default()
    }

    fn p(s: &str, n: usize) -> Expr {
        parse(s, &ParseContext::new(n, 1).with_fibers(2)).unwrap()
    }

    fn conns(name: &str) -> (Connection, Connection, Vec<Expr>) {
        let g = builtins::group(name).unwrap();
        let t = Splitting::from_group(&g, Variant::Tilde).connection();
        let h = Splitting::from_group(&g, Variant::Hat).connection();
        (t, h, g.domain(1))
    }

    #[test]
    fn abelian_dhat_is_plain_derivative() {
        let conn = Connection::new(2, vec![Expr::zero(); 8]);
        let form = FormOnT::new(2, 0, vec![SlotKind::Vector], vec![p("x1*xi1", 2)], true);
        let d = dhat(&conn, &form);
        assert_eq!(
            equiv_components(&d.comps, &[p("xi1", 2), Expr::zero()], &[], &cfg()),
            Verdict::Equal
        );
    }

    #[test]
    fn heisenberg_dhat_of_third_fiber_coordinate() {
        let (_, hat, _) = conns("heisenberg3");
        let form = FormOnT::new(3, 0, vec![SlotKind::Vector], vec![p("xi3", 3)], true);
        let d = dhat(&hat, &form);
        let want: Vec<Expr> = (0..3)
            .map(|r| Expr::sum((0..3).map(|b| Expr::mul(hat.get(2, r, b), &p(&format!("xi{}", b + 1), 3)))))
            .collect();
        assert_eq!(equiv_components(&d.comps, &want, &[], &cfg()), Verdict::Equal);
        assert_eq!(
            equiv_components(&d.comps[1..2], &[p("xi1", 3)], &[], &cfg()),
            Verdict::Equal
        );
    }

    #[test]
    fn dhat_squares_to_zero() {
        for name in ["heisenberg3", "affine2", "uppertriangular3"] {
            let (_, hat, dom) = conns(name);
            let n = hat.dim;
            for (k, slots, linear) in [
                (0, vec![SlotKind::Vector], false),
                (1, vec![SlotKind::Vector, SlotKind::Covector], true),
                (1, vec![], true),
            ] {
                let form = random_form_on_t(n, k, &slots, linear, 11 + k as u64);
                let dd = dhat(&hat, &dhat(&hat, &form));
                assert_eq!(check_zero_all(&dd.comps, &dom, &cfg()), Verdict::Equal, "{name} k={k}");
            }
        }
    }

    #[test]
    fn extension_is_invariant_and_recovers_seed() {
        for name in ["heisenberg3", "affine2"] {
            let g = builtins::group(name).unwrap();
            let s = Splitting::from_group(&g, Variant::Tilde);
            let conn = s.connection();
            let dom = g.domain(1);
            let seed = random_seed_on_t(g.dim, 1, &[SlotKind::Vector, SlotKind::Covector], true, 4);
            let ext = extend_on_t(&s, &g.identity, &seed);
            assert_eq!(
                check_zero_all(&box_linear(&conn, &ext), &dom, &cfg()),
                Verdict::Equal,
                "{name}"
            );
            let back = localize(&ext, &g.identity);
            assert_eq!(equiv_components(&back.comps, &seed.comps, &[], &cfg()), Verdict::Equal);
            assert_eq!(ext.check_multilinear(&dom, &cfg()), Verdict::Equal);
        }
    }

    #[test]
    fn non_invariant_form_has_witness() {
        let (tilde, hat, dom) = conns("heisenberg3");
        let form = FormOnT::new(3, 0, vec![SlotKind::Vector], vec![p("x1*xi1", 3)], true);
        assert!(check_zero_all(&box_linear(&tilde, &form), &dom, &cfg())
            .witness()
            .is_some());
        let (_, ahat, adom) = conns("affine2");
        let xi1 = FormOnT::new(2, 0, vec![SlotKind::Vector], vec![p("xi1", 2)], true);
        assert!(check_zero_all(&box_linear(&ahat, &xi1), &adom, &cfg())
            .witness()
            .is_some());
        let constant = FormOnT::new(3, 0, vec![], vec![Expr::int(5)], true);
        for c in [&tilde, &hat] {
            assert_eq!(check_zero_all(&box_linear(c, &constant), &[], &cfg()), Verdict::Equal);
        }
    }

    #[test]
    fn nonlinear_seed_extends() {
        let g = builtins::group("uppertriangular3").unwrap();
        let s = Splitting::from_group(&g, Variant::Tilde);
        let seed = random_seed_on_t(3, 2, &[SlotKind::Vector], false, 2);
        let ext = extend_on_t(&s, &g.identity, &seed);
        assert_eq!(
            check_zero_all(&box_linear(&s.connection(), &ext), &g.domain(1), &cfg()),
            Verdict::Equal
        );
    }

    #[test]
    fn determinant_of_triangular() {
        let m: Matrix = vec![
            vec![Expr::int(2), Expr::int(7), Expr::int(1)],
            vec![Expr::zero(), Expr::int(3), Expr::int(4)],
            vec![Expr::zero(), Expr::zero(), Expr::int(5)],
        ];
        assert_eq!(determinant(&m).as_const().cloned(), Some(crate::algebra::rational(30)));
    }
}
