use crate::expr::{Expr, VarRef};

use super::group::{at_x, x_vars, GroupLaw};
use super::splitting::{mat_vec, Splitting};
use super::tensor::{unflatten, TensorField};

/// A local diffeomorphism `x -> map(x)`. The components may contain other
/// point blocks, which then act as parameters.
#[derive(Clone, Debug)]
pub struct TranslationMap {
    pub dim: usize,
    pub map: Vec<Expr>,
}

impl TranslationMap {
    pub fn identity(dim: usize) -> Self {
        TranslationMap { dim, map: x_vars(dim) }
    }

    /// `self(other(x))`.
    pub fn compose(&self, other: &TranslationMap) -> TranslationMap {
        TranslationMap {
            dim: self.dim,
            map: at_x(&self.map, &other.map),
        }
    }

    pub fn apply(&self, p: &[Expr]) -> Vec<Expr> {
        at_x(&self.map, p)
    }

    /// Residual of `d f^i / d x^j = eps^i_j(x, f(x))`, flattened `[i][j]`.
    pub fn pde_residual(&self, s: &Splitting) -> Vec<Expr> {
        let n = self.dim;
        let eps = s.between(&x_vars(n), &self.map);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(Expr::sub(&self.map[i].diff(VarRef::x(j)), &eps[i][j]));
            }
        }
        out
    }
}

/// `z -> m(m(b, inv a), z)`: the tilde translation carrying `a` to `b`.
pub fn translation_g(g: &GroupLaw, a: &[Expr], b: &[Expr]) -> TranslationMap {
    let c = g.compose(b, &g.inverse(a));
    left_translation(g, &c)
}

/// `z -> m(z, m(inv a, b))`: the hat translation carrying `a` to `b`.
pub fn translation_h(g: &GroupLaw, a: &[Expr], b: &[Expr]) -> TranslationMap {
    let c = g.compose(&g.inverse(a), b);
    right_translation(g, &c)
}

pub fn left_translation(g: &GroupLaw, c: &[Expr]) -> TranslationMap {
    TranslationMap {
        dim: g.dim,
        map: g.compose(c, &x_vars(g.dim)),
    }
}

pub fn right_translation(g: &GroupLaw, c: &[Expr]) -> TranslationMap {
    TranslationMap {
        dim: g.dim,
        map: g.compose(&x_vars(g.dim), c),
    }
}

/// The hat translation whose arrow from `p` to `f(p)` is the hat splitting:
/// `x -> m(x, m(inv p, f(p)))`.
pub fn psi(g: &GroupLaw, f: &TranslationMap, p: &[Expr]) -> TranslationMap {
    translation_h(g, p, &f.apply(p))
}

/// Parallel transport of the value of `xi` at `p` along the splitting:
/// `x -> eps(p, x) xi(p)`. With the tilde splitting this takes a hat
/// invariant field to the tilde invariant field agreeing with it at `p`;
/// with the hat splitting it realizes the inverse correspondence.
pub fn dpsi(s: &Splitting, xi: &TensorField, p: &[Expr]) -> TensorField {
    let at_p = at_x(&xi.comps, p);
    TensorField::vector(mat_vec(&s.between(p, &x_vars(s.dim)), &at_p))
}

/// Push-forward of a tensor field by a hat translation:
/// `result(x) = eps_hat(q, x)_* t(q)` with `q = f_inv(x)`.
/// Upper indices transform by `eps_hat(q, x)`, lower ones by its inverse
/// `eps_hat(x, q)`.
pub fn il_pushforward(hat: &Splitting, f_inv: &TranslationMap, t: &TensorField) -> TensorField {
    let n = t.dim;
    let x = x_vars(n);
    let q = &f_inv.map;
    let fwd = hat.between(q, &x);
    let back = hat.between(&x, q);
    let pulled = at_x(&t.comps, q);
    let rank = t.rank();
    let comps = (0..t.comps.len())
        .map(|flat| {
            let out = unflatten(flat, n, rank);
            let terms = (0..t.comps.len()).filter_map(|src| {
                let c = &pulled[src];
                if c.is_zero() {
                    return None;
                }
                let inp = unflatten(src, n, rank);
                let mut factors = vec![c.clone()];
                for p in 0..rank {
                    let m = if p < t.upper {
                        &fwd[out[p]][inp[p]]
                    } else {
                        &back[inp[p]][out[p]]
                    };
                    if m.is_zero() {
                        return None;
                    }
                    factors.push(m.clone());
                }
                Some(Expr::product(factors))
            });
            Expr::sum(terms)
        })
        .collect();
    TensorField::new(n, t.upper, t.lower, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::expr::identity::{check_zero_all, equiv_components, IdentityConfig, Verdict};
    use crate::expr::Block;
    use crate::geometry::group::{point_vars, y_vars, z_vars};
    use crate::geometry::splitting::Variant;

    fn cfg() -> IdentityConfig {
        IdentityConfig::default()
    }

    #[test]
    fn translations_solve_their_equations() {
        for name in ["abelian:2", "heisenberg3", "affine2", "uppertriangular3"] {
            let g = builtins::group(name).unwrap();
            let n = g.dim;
            let (a, b) = (y_vars(n), z_vars(n));
            let dom = g.domain(3);
            let tilde = Splitting::from_group(&g, Variant::Tilde);
            let hat = Splitting::from_group(&g, Variant::Hat);
            let f = translation_g(&g, &a, &b);
            assert_eq!(
                check_zero_all(&f.pde_residual(&tilde), &dom, &cfg()),
                Verdict::Equal,
                "{name} g"
            );
            assert_eq!(equiv_components(&f.apply(&a), &b, &dom, &cfg()), Verdict::Equal);
            let h = translation_h(&g, &a, &b);
            assert_eq!(
                check_zero_all(&h.pde_residual(&hat), &dom, &cfg()),
                Verdict::Equal,
                "{name} h"
            );
            assert_eq!(equiv_components(&h.apply(&a), &b, &dom, &cfg()), Verdict::Equal);
        }
    }

    #[test]
    fn abelian_translation_is_a_shift() {
        let g = builtins::group("abelian:2").unwrap();
        let f = translation_g(&g, &y_vars(2), &z_vars(2));
        let want: Vec<Expr> = (0..2)
            .map(|i| {
                Expr::sum([
                    Expr::var(VarRef::x(i)),
                    Expr::var(VarRef::z(i)),
                    Expr::var(VarRef::y(i)).neg(),
                ])
            })
            .collect();
        assert_eq!(equiv_components(&f.map, &want, &[], &cfg()), Verdict::Equal);
    }

    #[test]
    fn psi_depends_on_base_for_heisenberg() {
        let g = builtins::group("heisenberg3").unwrap();
        let c = point_vars(Block::Point(3), 3);
        let f = left_translation(&g, &c);
        let p1 = psi(&g, &f, &y_vars(3));
        let p2 = psi(&g, &f, &z_vars(3));
        assert!(equiv_components(&p1.map, &p2.map, &[], &cfg()).witness().is_some());
        let ab = builtins::group("abelian:3").unwrap();
        let f = left_translation(&ab, &c);
        let q1 = psi(&ab, &f, &y_vars(3));
        let q2 = psi(&ab, &f, &z_vars(3));
        assert_eq!(equiv_components(&q1.map, &q2.map, &[], &cfg()), Verdict::Equal);
    }

    #[test]
    fn pushforward_by_identity_is_trivial() {
        let g = builtins::group("heisenberg3").unwrap();
        let hat = Splitting::from_group(&g, Variant::Hat);
        let t = crate::forms::random::random_tensor(3, 1, 1, 9);
        let out = il_pushforward(&hat, &TranslationMap::identity(3), &t);
        assert_eq!(equiv_components(&out.comps, &t.comps, &[], &cfg()), Verdict::Equal);
    }
}
