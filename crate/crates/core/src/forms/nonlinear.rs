//! Forms on products of point copies: the nonlinear horizontal complexes.

use crate::expr::{block_map, blocks_map, Block, Expr, VarRef};
use crate::geometry::{point_vars, x_vars, Connection, GroupLaw, Splitting, Variant};

use super::index::{binomial, IndexSet};
use super::linear::{fiber_vars, pullback, FormOnT, SlotKind};

/// A k-form at the first point `x` depending on `copies - 1` further points
/// (`Block::Point(1..copies)`). Form indices refer to coordinates at `x`.
#[derive(Clone, Debug)]
pub struct NonlinearForm {
    pub dim: usize,
    pub copies: usize,
    pub degree: usize,
    pub comps: Vec<Expr>,
}

impl NonlinearForm {
    pub fn new(dim: usize, copies: usize, degree: usize, comps: Vec<Expr>) -> Self {
        assert!(copies >= 1, "at least one point copy");
        assert_eq!(comps.len(), binomial(dim, degree), "component count");
        NonlinearForm {
            dim,
            copies,
            degree,
            comps,
        }
    }

    pub fn indices(&self) -> IndexSet {
        IndexSet::new(self.dim, self.degree)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> NonlinearForm {
        NonlinearForm {
            comps: self.comps.iter().map(f).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &NonlinearForm) -> NonlinearForm {
        assert_eq!((self.copies, self.degree), (other.copies, other.degree));
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| Expr::sub(a, b))
            .collect();
        NonlinearForm { comps, ..self.clone() }
    }

    fn component(&self, idx: &[usize], set: &IndexSet) -> Expr {
        match set.signed_position(idx) {
            Some((1, p)) => self.comps[p].clone(),
            Some((_, p)) => self.comps[p].neg(),
            None => Expr::zero(),
        }
    }
}

/// `d/dx^r + sum_c sum_a (d/dp_c^a) split^a_r(x, p_c)` on every component,
/// layout `[r][I]`.
fn point_derivatives(split: &Splitting, form: &NonlinearForm) -> Vec<Expr> {
    let n = form.dim;
    let x = x_vars(n);
    let moves: Vec<_> = (1..form.copies)
        .map(|c| split.between(&x, &point_vars(Block::Point(c as u8), n)))
        .collect();
    let mut out = Vec::with_capacity(n * form.comps.len());
    for r in 0..n {
        for comp in &form.comps {
            let mut terms = vec![comp.diff(VarRef::x(r))];
            for (c, m) in moves.iter().enumerate() {
                for a in 0..n {
                    let d = comp.diff(VarRef::point(c as u8 + 1, a));
                    if !d.is_zero() && !m[a][r].is_zero() {
                        terms.push(Expr::mul(&d, &m[a][r]));
                    }
                }
            }
            out.push(Expr::sum(terms));
        }
    }
    out
}

/// Horizontal differential along the graphs of the translations of `s`:
/// alternation of `d/dx^r + sum_c (d/dp_c^a) eps^a_r(x, p_c)`.
pub fn dtilde(s: &Splitting, form: &NonlinearForm) -> NonlinearForm {
    let n = form.dim;
    let k = form.degree;
    let src = form.indices();
    let dst = IndexSet::new(n, k + 1);
    let d = point_derivatives(s, form);
    let nk = src.len();
    let comps = dst
        .tuples
        .iter()
        .map(|j| {
            Expr::sum((0..=k).map(|p| {
                let mut rest = j.clone();
                let r = rest.remove(p);
                let term = d[r * nk + src.position(&rest).expect("sorted subtuple")].clone();
                if p % 2 == 0 {
                    term
                } else {
                    term.neg()
                }
            }))
        })
        .collect();
    NonlinearForm::new(n, form.copies, k + 1, comps)
}

/// Which transports define an invariance condition on multi-point forms:
/// the form indices move by the `form` splitting, the extra points by the
/// translations whose arrows are the `points` splitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Invariance {
    pub form: Variant,
    pub points: Variant,
}

impl Invariance {
    /// Invariance under simultaneous left translation of all points:
    /// points move along the hat arrows, indices by the tilde transport.
    pub const HAT: Invariance = Invariance {
        form: Variant::Tilde,
        points: Variant::Hat,
    };
    /// Invariance under simultaneous right translation of all points.
    pub const TILDE: Invariance = Invariance {
        form: Variant::Hat,
        points: Variant::Tilde,
    };
    /// Indices and points both moved by the hat structure.
    pub const HAT_UNMIXED: Invariance = Invariance {
        form: Variant::Hat,
        points: Variant::Hat,
    };

    pub fn of(variant: Variant) -> Invariance {
        match variant {
            Variant::Tilde => Self::TILDE,
            Variant::Hat => Self::HAT,
        }
    }
}

/// Infinitesimal invariance operator, layout `[r][I]`:
/// `d/dx^r w_I + sum_c (d w_I/dp_c^a) split^a_r(x, p_c) + sum_p Gamma^a_{r i_p} w_{..a..}`.
pub fn box_nonlinear(form_conn: &Connection, point_split: &Splitting, form: &NonlinearForm) -> Vec<Expr> {
    let n = form.dim;
    let set = form.indices();
    let nk = set.len();
    let d = point_derivatives(point_split, form);
    let mut out = Vec::with_capacity(n * nk);
    for r in 0..n {
        for (pos, idx) in set.tuples.iter().enumerate() {
            let mut terms = vec![d[r * nk + pos].clone()];
            for p in 0..idx.len() {
                for a in 0..n {
                    let g = form_conn.get(a, r, idx[p]);
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

/// The invariance operator of a group for the given condition.
pub fn box_group(g: &GroupLaw, inv: Invariance, form: &NonlinearForm) -> Vec<Expr> {
    let conn = Splitting::from_group(g, inv.form).connection();
    box_nonlinear(&conn, &Splitting::from_group(g, inv.points), form)
}

/// Simplicial coboundary `sum_i (-1)^i w(p_0, .., omit p_i, .., p_m)`.
/// The term without `p_0` is a form at `p_1`; it is pulled back to `p_0`
/// along `eps(p_0, p_1)` of the splitting `s`.
pub fn delta(s: &Splitting, form: &NonlinearForm) -> NonlinearForm {
    let n = form.dim;
    let m = form.copies;
    let k = form.degree;
    let shifted = |skip: usize| -> Vec<Expr> {
        let renames: Vec<(Block, Block)> = (0..m)
            .map(|j| {
                (
                    Block::Point(j as u8),
                    Block::Point(if j < skip { j } else { j + 1 } as u8),
                )
            })
            .collect();
        let map = block_map(&renames, n);
        form.comps.iter().map(|c| c.subst(&map)).collect()
    };
    let first = pullback(
        &shifted(0),
        &s.between(&x_vars(n), &point_vars(Block::Point(1), n)),
        n,
        k,
    );
    let mut comps = first;
    for i in 1..=m {
        let term = shifted(i);
        for (acc, t) in comps.iter_mut().zip(term) {
            *acc = if i % 2 == 0 {
                Expr::add(acc, &t)
            } else {
                Expr::sub(acc, &t)
            };
        }
    }
    NonlinearForm::new(n, m + 1, k, comps)
}

/// Linearization at the diagonal: differentiate along a direction `f_{c-1}`
/// in every extra copy `c`, then set all points equal to `x`. The result
/// is multilinear in `copies - 1` vector slots.
pub fn linearize(form: &NonlinearForm) -> FormOnT {
    let n = form.dim;
    let m = form.copies;
    assert!(m >= 2, "linearization needs a second point");
    let x = x_vars(n);
    let diag: Vec<(Block, &[Expr])> = (1..m).map(|c| (Block::Point(c as u8), x.as_slice())).collect();
    let diag = blocks_map(&diag);
    let comps = form
        .comps
        .iter()
        .map(|comp| {
            let mut e = comp.clone();
            for c in 1..m {
                let f = fiber_vars(c - 1, n);
                e = Expr::sum((0..n).map(|a| Expr::mul(&f[a], &e.diff(VarRef::point(c as u8, a)))));
            }
            e.subst(&diag)
        })
        .collect();
    FormOnT::new(n, form.degree, vec![SlotKind::Vector; m - 1], comps, true)
}

/// Extends a seed, whose components depend on relative points in blocks
/// `1..copies`, to the form invariant under `inv`. With `points = Hat` the
/// relative points are `m(inv x, p_c)`, with `Tilde` they are
/// `m(p_c, inv x)`; the indices are pulled back along `eps(x, e)` of the
/// `form` splitting.
pub fn extend_nonlinear(g: &GroupLaw, inv: Invariance, seed: &NonlinearForm) -> NonlinearForm {
    let n = g.dim;
    let x = x_vars(n);
    let ix = g.inverse(&x);
    let relative: Vec<Vec<Expr>> = (1..seed.copies)
        .map(|c| {
            let p = point_vars(Block::Point(c as u8), n);
            match inv.points {
                Variant::Hat => g.compose(&ix, &p),
                Variant::Tilde => g.compose(&p, &ix),
            }
        })
        .collect();
    let assignments: Vec<(Block, &[Expr])> = relative
        .iter()
        .enumerate()
        .map(|(c, v)| (Block::Point(c as u8 + 1), v.as_slice()))
        .collect();
    let map = blocks_map(&assignments);
    let moved: Vec<Expr> = seed.comps.iter().map(|c| c.subst(&map)).collect();
    let f = Splitting::from_group(g, inv.form).between(&x, &g.identity_exprs());
    NonlinearForm::new(n, seed.copies, seed.degree, pullback(&moved, &f, n, seed.degree))
}
