//! Differentiation and simultaneous substitution.

use std::collections::HashMap;

use super::{Block, Expr, Func, Node, VarRef};

impl Expr {
    /// Exact partial derivative with respect to `v`.
    pub fn diff(&self, v: VarRef) -> Expr {
        let mut memo = HashMap::new();
        diff_rec(self, v, &mut memo)
    }

    /// Simultaneous substitution of variables by expressions.
    pub fn subst(&self, map: &HashMap<VarRef, Expr>) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        let mut memo = HashMap::new();
        subst_rec(self, map, &mut memo)
    }

    /// Renames whole blocks, e.g. `y -> x` for restriction to the diagonal.
    /// `dim` bounds the component indices that are remapped.
    pub fn rename_blocks(&self, renames: &[(Block, Block)], dim: usize) -> Expr {
        self.subst(&block_map(renames, dim))
    }

    /// Substitutes a whole point block by a list of expressions.
    pub fn subst_block(&self, block: Block, values: &[Expr]) -> Expr {
        let map = values
            .iter()
            .enumerate()
            .map(|(i, e)| (VarRef { block, index: i }, e.clone()))
            .collect();
        self.subst(&map)
    }
}

/// Substitution map renaming every component of the given blocks.
pub fn block_map(renames: &[(Block, Block)], dim: usize) -> HashMap<VarRef, Expr> {
    let mut map = HashMap::new();
    for &(from, to) in renames {
        for i in 0..dim {
            map.insert(
                VarRef { block: from, index: i },
                Expr::var(VarRef { block: to, index: i }),
            );
        }
    }
    map
}

/// Substitution map assigning expressions to several blocks at once.
pub fn blocks_map(assignments: &[(Block, &[Expr])]) -> HashMap<VarRef, Expr> {
    let mut map = HashMap::new();
    for (block, values) in assignments {
        for (i, e) in values.iter().enumerate() {
            map.insert(
                VarRef {
                    block: *block,
                    index: i,
                },
                e.clone(),
            );
        }
    }
    map
}

fn diff_rec(e: &Expr, v: VarRef, memo: &mut HashMap<usize, Expr>) -> Expr {
    let shared = e.is_shared();
    if shared {
        if let Some(d) = memo.get(&e.id()) {
            return d.clone();
        }
    }
    let d = match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var(u) => {
            if *u == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(terms) => Expr::sum(terms.iter().map(|t| diff_rec(t, v, memo))),
        Node::Mul(factors) => {
            let derivs: Vec<Expr> = factors.iter().map(|f| diff_rec(f, v, memo)).collect();
            let mut terms = Vec::new();
            for (i, di) in derivs.iter().enumerate() {
                if di.is_zero() {
                    continue;
                }
                let others = factors
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, f)| f.clone());
                terms.push(Expr::product(others.chain(std::iter::once(di.clone()))));
            }
            Expr::sum(terms)
        }
        Node::Neg(a) => diff_rec(a, v, memo).neg(),
        Node::Div(a, b) => {
            let da = diff_rec(a, v, memo);
            let db = diff_rec(b, v, memo);
            let first = Expr::div(&da, b);
            if db.is_zero() {
                first
            } else {
                let second = Expr::div(&Expr::mul(a, &db), &Expr::pow(b, 2));
                Expr::sub(&first, &second)
            }
        }
        Node::Pow(a, k) => {
            let da = diff_rec(a, v, memo);
            if da.is_zero() {
                Expr::zero()
            } else {
                Expr::product([Expr::int(*k as i64), Expr::pow(a, k - 1), da])
            }
        }
        Node::Call(func, a) => {
            let da = diff_rec(a, v, memo);
            if da.is_zero() {
                Expr::zero()
            } else {
                let outer = match func {
                    Func::Exp => e.clone(),
                    Func::Log => Expr::div(&Expr::one(), a),
                    Func::Sin => Expr::call(Func::Cos, a),
                    Func::Cos => Expr::call(Func::Sin, a).neg(),
                };
                Expr::mul(&outer, &da)
            }
        }
    };
    if shared {
        memo.insert(e.id(), d.clone());
    }
    d
}

fn subst_rec(e: &Expr, map: &HashMap<VarRef, Expr>, memo: &mut HashMap<usize, Expr>) -> Expr {
    let shared = e.is_shared();
    if shared {
        if let Some(d) = memo.get(&e.id()) {
            return d.clone();
        }
    }
    let out = match e.node() {
        Node::Const(_) => e.clone(),
        Node::Var(u) => map.get(u).cloned().unwrap_or_else(|| e.clone()),
        Node::Add(terms) => {
            let new: Vec<Expr> = terms.iter().map(|t| subst_rec(t, map, memo)).collect();
            if unchanged(terms, &new) {
                e.clone()
            } else {
                Expr::sum(new)
            }
        }
        Node::Mul(factors) => {
            let new: Vec<Expr> = factors.iter().map(|t| subst_rec(t, map, memo)).collect();
            if unchanged(factors, &new) {
                e.clone()
            } else {
                Expr::product(new)
            }
        }
        Node::Neg(a) => {
            let na = subst_rec(a, map, memo);
            if na.id() == a.id() {
                e.clone()
            } else {
                na.neg()
            }
        }
        Node::Div(a, b) => {
            let na = subst_rec(a, map, memo);
            let nb = subst_rec(b, map, memo);
            if na.id() == a.id() && nb.id() == b.id() {
                e.clone()
            } else {
                Expr::div(&na, &nb)
            }
        }
        Node::Pow(a, k) => {
            let na = subst_rec(a, map, memo);
            if na.id() == a.id() {
                e.clone()
            } else {
                Expr::pow(&na, *k)
            }
        }
        Node::Call(f, a) => {
            let na = subst_rec(a, map, memo);
            if na.id() == a.id() {
                e.clone()
            } else {
                Expr::call(*f, &na)
            }
        }
    };
    if shared {
        memo.insert(e.id(), out.clone());
    }
    out
}

fn unchanged(old: &[Expr], new: &[Expr]) -> bool {
    old.iter().zip(new).all(|(a, b)| a.id() == b.id())
}
