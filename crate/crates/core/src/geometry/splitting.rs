use std::fmt;

use crate::check::Check;
use crate::expr::identity::{equiv_components, IdentityConfig};
use crate::expr::{block_map, Block, Expr, VarRef};

use super::group::{at_x, at_xy, point_vars, x_vars, y_vars, z_vars, GroupLaw};
use super::tensor::{Connection, TensorField};

/// Which of the two dual structures an object belongs to. Tilde objects come
/// from left translations `u -> m(m(q, inv p), u)`, hat objects from right
/// translations `u -> m(u, m(inv p, q))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Tilde,
    Hat,
}

impl Variant {
    pub fn dual(self) -> Variant {
        match self {
            Variant::Tilde => Variant::Hat,
            Variant::Hat => Variant::Tilde,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Tilde => "tilde",
            Variant::Hat => "hat",
        })
    }
}

pub type Matrix = Vec<Vec<Expr>>;

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| Expr::sum((0..b.len()).map(|k| Expr::mul(&a[i][k], &b[k][j]))))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[Expr]) -> Vec<Expr> {
    a.iter()
        .map(|row| Expr::sum(row.iter().zip(v).map(|(m, x)| Expr::mul(m, x))))
        .collect()
}

pub fn identity_matrix(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Expr::one() } else { Expr::zero() })
                .collect()
        })
        .collect()
}

fn flatten(m: &Matrix) -> Vec<Expr> {
    m.iter().flatten().cloned().collect()
}

/// A splitting: for each ordered pair of points `(x, y)` an invertible
/// matrix `eps(x, y)` mapping vectors at `x` to vectors at `y`.
/// `eps[i][j]` is `eps^i_j`, upper index at the target.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub dim: usize,
    pub eps: Matrix,
    pub variant: Variant,
    /// Expressions in block `x` that must be nonzero at every point.
    pub constraints: Vec<Expr>,
}

impl Splitting {
    pub fn new(dim: usize, eps: Matrix, variant: Variant, constraints: Vec<Expr>) -> Self {
        assert_eq!(eps.len(), dim);
        assert!(eps.iter().all(|r| r.len() == dim));
        Splitting {
            dim,
            eps,
            variant,
            constraints,
        }
    }

    /// Jacobian of the translation carrying `x` to `y`, evaluated at `x`.
    pub fn from_group(g: &GroupLaw, variant: Variant) -> Self {
        let n = g.dim;
        let (x, y, z) = (x_vars(n), y_vars(n), z_vars(n));
        let image = match variant {
            Variant::Tilde => g.compose(&g.compose(&y, &g.inverse(&x)), &z),
            Variant::Hat => g.compose(&z, &g.compose(&g.inverse(&x), &y)),
        };
        let back = block_map(&[(Block::Point(2), Block::Point(0))], n);
        let eps = (0..n)
            .map(|i| (0..n).map(|j| image[i].diff(VarRef::z(j)).subst(&back)).collect())
            .collect();
        Splitting::new(n, eps, variant, g.constraints.clone())
    }

    /// `eps(a, b)` for coordinate expressions `a`, `b`.
    pub fn between(&self, a: &[Expr], b: &[Expr]) -> Matrix {
        self.eps.iter().map(|row| at_xy(row, a, b)).collect()
    }

    /// `eps` with its two arguments placed on the given point blocks.
    pub fn on_blocks(&self, from: Block, to: Block) -> Matrix {
        self.between(&point_vars(from, self.dim), &point_vars(to, self.dim))
    }

    pub fn constraints_on(&self, blocks: &[Block]) -> Vec<Expr> {
        blocks
            .iter()
            .flat_map(|&b| at_x(&self.constraints, &point_vars(b, self.dim)))
            .collect()
    }

    pub fn domain(&self, copies: u8) -> Vec<Expr> {
        let blocks: Vec<Block> = (0..copies).map(Block::Point).collect();
        self.constraints_on(&blocks)
    }

    /// Diagonal identity, composition and inversion of arrows.
    pub fn verify_axioms(&self, cfg: &IdentityConfig) -> Vec<Check> {
        let n = self.dim;
        let x = x_vars(n);
        let id = flatten(&identity_matrix(n));
        let diag = flatten(&self.between(&x, &x));
        let (p0, p1, p2) = (Block::Point(0), Block::Point(1), Block::Point(2));
        let compose = mat_mul(&self.on_blocks(p1, p2), &self.on_blocks(p0, p1));
        let inversion = mat_mul(&self.on_blocks(p0, p1), &self.on_blocks(p1, p0));
        let prefix = format!("splitting.{}", self.variant);
        vec![
            Check::new(
                format!("{prefix}.diagonal"),
                equiv_components(&diag, &id, &self.domain(1), cfg),
            ),
            Check::new(
                format!("{prefix}.composition"),
                equiv_components(
                    &flatten(&compose),
                    &flatten(&self.on_blocks(p0, p2)),
                    &self.domain(3),
                    cfg,
                ),
            ),
            Check::new(
                format!("{prefix}.inversion"),
                equiv_components(&flatten(&inversion), &id, &self.domain(2), cfg),
            ),
        ]
    }

    /// `Gamma^i_{kj}(x) = d eps^i_j / d y^k` at `y = x`.
    pub fn connection(&self) -> Connection {
        let n = self.dim;
        let diag = block_map(&[(Block::Point(1), Block::Point(0))], n);
        let mut gamma = vec![Expr::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    gamma[(i * n + k) * n + j] = self.eps[i][j].diff(VarRef::y(k)).subst(&diag);
                }
            }
        }
        Connection::new(n, gamma)
    }

    /// The dual connection `-d eps^i_j / d x^k` at `x = y`, stored as the
    /// component with lower indices `(j, k)`.
    pub fn dual_connection(&self) -> Connection {
        let n = self.dim;
        let diag = block_map(&[(Block::Point(0), Block::Point(1))], n);
        let back = block_map(&[(Block::Point(1), Block::Point(0))], n);
        let mut gamma = vec![Expr::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    gamma[(i * n + j) * n + k] = self.eps[i][j].diff(VarRef::x(k)).subst(&diag).subst(&back).neg();
                }
            }
        }
        Connection::new(n, gamma)
    }

    /// Two-point integrability tensor, alternation in `(s, r)` of
    /// `d eps^a_r / d x^s + (d eps^a_r / d y^b) eps^b_s`, layout `[a][s][r]`.
    /// It vanishes identically exactly when the splitting defines a local
    /// Lie group.
    pub fn nonlinear_curvature(&self) -> TensorField {
        let n = self.dim;
        let term = |a: usize, s: usize, r: usize| {
            let e = &self.eps[a][r];
            Expr::sum(
                std::iter::once(e.diff(VarRef::x(s)))
                    .chain((0..n).map(|b| Expr::mul(&e.diff(VarRef::y(b)), &self.eps[b][s]))),
            )
        };
        let mut comps = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for s in 0..n {
                for r in 0..n {
                    comps.push(Expr::sub(&term(a, s, r), &term(a, r, s)));
                }
            }
        }
        TensorField::new(n, 1, 2, comps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::expr::identity::{check_zero_all, Verdict};
    use crate::expr::{parse, ParseContext};

    fn cfg() -> IdentityConfig {
        IdentityConfig::default()
    }

    fn parse_matrix(rows: &[&[&str]], n: usize) -> Matrix {
        let ctx = ParseContext::new(n, 2);
        rows.iter()
            .map(|r| r.iter().map(|s| parse(s, &ctx).unwrap()).collect())
            .collect()
    }

    fn assert_matrix(got: &Matrix, want: &Matrix, dom: &[Expr]) {
        let v = equiv_components(&flatten(got), &flatten(want), dom, &cfg());
        assert_eq!(v, Verdict::Equal);
    }

    #[test]
    fn heisenberg_tilde_matrix() {
        let g = builtins::group("heisenberg3").unwrap();
        let s = Splitting::from_group(&g, Variant::Tilde);
        let want = parse_matrix(&[&["1", "0", "0"], &["0", "1", "0"], &["0", "y1 - x1", "1"]], 3);
        assert_matrix(&s.eps, &want, &[]);
    }

    #[test]
    fn affine_tilde_matrix() {
        let g = builtins::group("affine2").unwrap();
        let s = Splitting::from_group(&g, Variant::Tilde);
        let want = parse_matrix(&[&["y1/x1", "0"], &["0", "y1/x1"]], 2);
        assert_matrix(&s.eps, &want, &g.domain(2));
    }

    #[test]
    fn abelian_is_identity() {
        let g = builtins::group("abelian:3").unwrap();
        let s = Splitting::from_group(&g, Variant::Tilde);
        assert_matrix(&s.eps, &identity_matrix(3), &[]);
    }

    #[test]
    fn splitting_axioms_for_builtins() {
        for name in ["abelian:2", "heisenberg3", "affine2", "uppertriangular3"] {
            let g = builtins::group(name).unwrap();
            for v in [Variant::Tilde, Variant::Hat] {
                for c in Splitting::from_group(&g, v).verify_axioms(&cfg()) {
                    assert!(c.passed(), "{name} {}: {}", c.id, c.verdict);
                }
            }
        }
    }

    #[test]
    fn raw_non_integrable_splitting() {
        let s = builtins::non_integrable_splitting();
        assert!(s.verify_axioms(&cfg()).iter().all(Check::passed));
        let r = s.nonlinear_curvature();
        assert!(check_zero_all(&r.comps, &[], &cfg()).witness().is_some());
    }

    #[test]
    fn groups_have_vanishing_nonlinear_curvature() {
        for name in ["abelian:2", "heisenberg3", "affine2", "uppertriangular3"] {
            let g = builtins::group(name).unwrap();
            let s = Splitting::from_group(&g, Variant::Tilde);
            let r = s.nonlinear_curvature();
            assert_eq!(check_zero_all(&r.comps, &s.domain(2), &cfg()), Verdict::Equal, "{name}");
        }
    }
}
