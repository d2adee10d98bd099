use num_rational::BigRational;

use crate::check::Check;
use crate::expr::identity::{equiv_components, IdentityConfig};
use crate::expr::{blocks_map, Block, Expr, VarRef};

/// A group law in coordinates: `mult` in blocks `x`, `y`; `inv` in `x`.
#[derive(Clone, Debug)]
pub struct GroupLaw {
    pub name: String,
    pub dim: usize,
    pub mult: Vec<Expr>,
    pub inv: Vec<Expr>,
    pub identity: Vec<BigRational>,
    /// Expressions in block `x` that must be nonzero on the domain.
    pub constraints: Vec<Expr>,
}

/// Coordinates of a point block as expressions.
pub fn point_vars(block: Block, dim: usize) -> Vec<Expr> {
    (0..dim).map(|i| Expr::var(VarRef { block, index: i })).collect()
}

pub fn x_vars(dim: usize) -> Vec<Expr> {
    point_vars(Block::Point(0), dim)
}

pub fn y_vars(dim: usize) -> Vec<Expr> {
    point_vars(Block::Point(1), dim)
}

pub fn z_vars(dim: usize) -> Vec<Expr> {
    point_vars(Block::Point(2), dim)
}

pub fn constants(values: &[BigRational]) -> Vec<Expr> {
    values.iter().cloned().map(Expr::constant).collect()
}

/// Substitutes `x := a` in every expression.
pub fn at_x(exprs: &[Expr], a: &[Expr]) -> Vec<Expr> {
    let map = blocks_map(&[(Block::Point(0), a)]);
    exprs.iter().map(|e| e.subst(&map)).collect()
}

/// Substitutes `x := a, y := b` simultaneously.
pub fn at_xy(exprs: &[Expr], a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    let map = blocks_map(&[(Block::Point(0), a), (Block::Point(1), b)]);
    exprs.iter().map(|e| e.subst(&map)).collect()
}

impl GroupLaw {
    /// `m(a, b)` for coordinate expressions `a`, `b`.
    pub fn compose(&self, a: &[Expr], b: &[Expr]) -> Vec<Expr> {
        at_xy(&self.mult, a, b)
    }

    pub fn inverse(&self, a: &[Expr]) -> Vec<Expr> {
        at_x(&self.inv, a)
    }

    pub fn identity_exprs(&self) -> Vec<Expr> {
        constants(&self.identity)
    }

    /// Domain constraints imposed on each listed point block.
    pub fn constraints_on(&self, blocks: &[Block]) -> Vec<Expr> {
        blocks
            .iter()
            .flat_map(|&b| at_x(&self.constraints, &point_vars(b, self.dim)))
            .collect()
    }

    /// The standard constraint set on the first `copies` point blocks.
    pub fn domain(&self, copies: u8) -> Vec<Expr> {
        let blocks: Vec<Block> = (0..copies).map(Block::Point).collect();
        self.constraints_on(&blocks)
    }

    /// Identity, inverse and associativity laws under randomized testing.
    pub fn verify_axioms(&self, cfg: &IdentityConfig) -> Vec<Check> {
        let n = self.dim;
        let (x, y, z) = (x_vars(n), y_vars(n), z_vars(n));
        let e = self.identity_exprs();
        let dom1 = self.domain(1);
        let dom3 = self.domain(3);
        let mut out = Vec::new();
        let mut push = |id: &str, lhs: Vec<Expr>, rhs: Vec<Expr>, dom: &[Expr]| {
            out.push(Check::new(id, equiv_components(&lhs, &rhs, dom, cfg)));
        };
        push("group.right-identity", self.compose(&x, &e), x.clone(), &dom1);
        push("group.left-identity", self.compose(&e, &x), x.clone(), &dom1);
        let ix = self.inverse(&x);
        push("group.right-inverse", self.compose(&x, &ix), e.clone(), &dom1);
        push("group.left-inverse", self.compose(&ix, &x), e.clone(), &dom1);
        push(
            "group.associativity",
            self.compose(&self.compose(&x, &y), &z),
            self.compose(&x, &self.compose(&y, &z)),
            &dom3,
        );
        out
    }
}
