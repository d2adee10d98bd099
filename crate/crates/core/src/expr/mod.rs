//! Symbolic scalar expressions over blocks of coordinate variables.
//!
//! Expressions are immutable trees with shared subtrees (`Arc`), built through
//! smart constructors that apply only trivial local rewrites: additive and
//! multiplicative identities, absorbing zero, `e^0`, and folding of
//! constant-only operands. There is no canonical form; equality of two
//! expressions is decided by randomized exact evaluation (see [`identity`]).

mod calc;
mod eval;
mod normal;
pub use eval::Scalar;
pub mod identity;
mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use calc::{block_map, blocks_map};
pub use eval::{EvalError, EvalMode, Evaluator, SamplePoint, Value};
pub use parse::{parse, ParseContext, ParseError, ParseErrorKind};

/// Which family of variables a coordinate symbol belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    /// Point copy `c` of the manifold: `x` (0), `y` (1), `z` (2), `w` (3), ...
    Point(u8),
    /// Fiber slot `s`: `xi` (0), `eta` (1), `zeta` (2), ...
    Fiber(u8),
    /// The deformation parameter `t`.
    Param,
}

/// A single coordinate symbol. `index` is zero-based; it prints one-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarRef {
    pub block: Block,
    pub index: usize,
}

impl VarRef {
    pub const fn point(copy: u8, index: usize) -> Self {
        VarRef {
            block: Block::Point(copy),
            index,
        }
    }

    pub const fn fiber(slot: u8, index: usize) -> Self {
        VarRef {
            block: Block::Fiber(slot),
            index,
        }
    }

    pub const fn param() -> Self {
        VarRef {
            block: Block::Param,
            index: 0,
        }
    }

    pub fn x(index: usize) -> Self {
        Self::point(0, index)
    }

    pub fn y(index: usize) -> Self {
        Self::point(1, index)
    }

    pub fn z(index: usize) -> Self {
        Self::point(2, index)
    }
}

const POINT_NAMES: [&str; 4] = ["x", "y", "z", "w"];
const FIBER_NAMES: [&str; 3] = ["xi", "eta", "zeta"];

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.block {
            Block::Point(c) if (c as usize) < POINT_NAMES.len() => {
                write!(f, "{}{}", POINT_NAMES[c as usize], self.index + 1)
            }
            Block::Point(c) => write!(f, "p{}_{}", c, self.index + 1),
            Block::Fiber(s) if (s as usize) < FIBER_NAMES.len() => {
                write!(f, "{}{}", FIBER_NAMES[s as usize], self.index + 1)
            }
            Block::Fiber(s) => write!(f, "f{}_{}", s, self.index + 1),
            Block::Param => write!(f, "t"),
        }
    }
}

/// Elementary functions with known derivative rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub enum Node {
    Const(BigRational),
    Var(VarRef),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Call(Func, Expr),
}

/// Shared handle to an immutable expression tree.
#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// True when other handles point at the same node, so memoizing it pays.
    pub(crate) fn is_shared(&self) -> bool {
        Arc::strong_count(&self.0) > 1
    }

    fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn constant(value: BigRational) -> Self {
        Self::from_node(Node::Const(value))
    }

    pub fn int(value: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn var(v: VarRef) -> Self {
        Self::from_node(Node::Var(v))
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }

    pub fn add(a: &Expr, b: &Expr) -> Expr {
        Self::sum([a.clone(), b.clone()])
    }

    pub fn sub(a: &Expr, b: &Expr) -> Expr {
        Self::sum([a.clone(), b.neg()])
    }

    pub fn mul(a: &Expr, b: &Expr) -> Expr {
        Self::product([a.clone(), b.clone()])
    }

    /// N-ary sum with zero terms dropped, nested sums flattened and constants folded.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = BigRational::zero();
        let mut rest = Vec::new();
        for t in terms {
            match t.node() {
                Node::Const(c) => constant += c,
                Node::Add(inner) => {
                    for u in inner {
                        match u.node() {
                            Node::Const(c) => constant += c,
                            _ => rest.push(u.clone()),
                        }
                    }
                }
                _ => rest.push(t),
            }
        }
        let mut rest = collect_like_terms(rest);
        if !constant.is_zero() {
            rest.push(Expr::constant(constant));
        }
        match rest.len() {
            0 => Expr::zero(),
            1 => rest.pop().unwrap(),
            _ => Self::from_node(Node::Add(rest)),
        }
    }

    /// N-ary product; any zero factor collapses the product, unit factors vanish.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut constant = BigRational::one();
        let mut rest = Vec::new();
        for f in factors {
            match f.node() {
                Node::Const(c) => {
                    if c.is_zero() {
                        return Expr::zero();
                    }
                    constant *= c;
                }
                Node::Mul(inner) => {
                    for u in inner {
                        match u.node() {
                            Node::Const(c) => constant *= c,
                            _ => rest.push(u.clone()),
                        }
                    }
                }
                _ => rest.push(f),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        if rest.is_empty() {
            return Expr::constant(constant);
        }
        let body = if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            Self::from_node(Node::Mul(rest))
        };
        if constant.is_one() {
            body
        } else if (-constant.clone()).is_one() {
            body.neg()
        } else {
            Self::from_node(Node::Mul(vec![Expr::constant(constant), body]))
        }
    }

    pub fn neg(&self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::from_node(Node::Neg(self.clone())),
        }
    }

    /// Quotient. Constant/constant folds unless the denominator is zero, in
    /// which case the division node is kept so evaluation reports the fault.
    pub fn div(num: &Expr, den: &Expr) -> Expr {
        if den.is_one() {
            return num.clone();
        }
        if let (Some(a), Some(b)) = (num.as_const(), den.as_const()) {
            if !b.is_zero() {
                return Expr::constant(a / b);
            }
        }
        if num.is_zero() && den.as_const().is_some_and(|b| !b.is_zero()) {
            return Expr::zero();
        }
        Self::from_node(Node::Div(num.clone(), den.clone()))
    }

    pub fn pow(base: &Expr, exp: i32) -> Expr {
        match exp {
            0 => Expr::one(),
            1 => base.clone(),
            _ => {
                if let Some(c) = base.as_const() {
                    if exp > 0 || !c.is_zero() {
                        return Expr::constant(pow_rational(c, exp));
                    }
                }
                Self::from_node(Node::Pow(base.clone(), exp))
            }
        }
    }

    pub fn call(func: Func, arg: &Expr) -> Expr {
        if let Some(c) = arg.as_const() {
            if c.is_zero() {
                match func {
                    Func::Exp | Func::Cos => return Expr::one(),
                    Func::Sin => return Expr::zero(),
                    Func::Log => {}
                }
            } else if c.is_one() && func == Func::Log {
                return Expr::zero();
            }
        }
        Self::from_node(Node::Call(func, arg.clone()))
    }

    /// All variables occurring in the expression.
    pub fn variables(&self) -> BTreeSet<VarRef> {
        let mut out = BTreeSet::new();
        collect_vars(self, &mut out, &mut std::collections::HashSet::new());
        out
    }

    /// True if the tree contains an elementary-function node.
    pub fn is_transcendental(&self) -> bool {
        fn walk(e: &Expr, seen: &mut std::collections::HashSet<usize>) -> bool {
            if !seen.insert(e.id()) {
                return false;
            }
            match e.node() {
                Node::Const(_) | Node::Var(_) => false,
                Node::Call(..) => true,
                Node::Add(v) | Node::Mul(v) => v.iter().any(|u| walk(u, seen)),
                Node::Neg(a) | Node::Pow(a, _) => walk(a, seen),
                Node::Div(a, b) => walk(a, seen) || walk(b, seen),
            }
        }
        walk(self, &mut std::collections::HashSet::new())
    }

    /// Denominators of every division node: the expression is defined only
    /// where each of them is nonzero.
    pub fn domain_constraints(&self) -> Vec<Expr> {
        fn walk(e: &Expr, seen: &mut std::collections::HashSet<usize>, out: &mut Vec<Expr>) {
            if !seen.insert(e.id()) {
                return;
            }
            match e.node() {
                Node::Const(_) | Node::Var(_) => {}
                Node::Add(v) | Node::Mul(v) => v.iter().for_each(|u| walk(u, seen, out)),
                Node::Neg(a) | Node::Call(_, a) => walk(a, seen, out),
                Node::Pow(a, k) => {
                    if *k < 0 {
                        out.push(a.clone());
                    }
                    walk(a, seen, out)
                }
                Node::Div(a, b) => {
                    out.push(b.clone());
                    walk(a, seen, out);
                    walk(b, seen, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut std::collections::HashSet::new(), &mut out);
        out
    }

    /// Number of distinct nodes in the shared tree.
    pub fn node_count(&self) -> usize {
        fn walk(e: &Expr, seen: &mut std::collections::HashSet<usize>) {
            if !seen.insert(e.id()) {
                return;
            }
            match e.node() {
                Node::Const(_) | Node::Var(_) => {}
                Node::Add(v) | Node::Mul(v) => v.iter().for_each(|u| walk(u, seen)),
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => walk(a, seen),
                Node::Div(a, b) => {
                    walk(a, seen);
                    walk(b, seen);
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        walk(self, &mut seen);
        seen.len()
    }
}

#[derive(PartialEq, Eq, Hash, Clone, Copy)]
enum TermKey {
    Var(VarRef),
    Node(usize),
}

/// Splits a term into `coefficient * base`, keyed by variable or node identity.
fn linear_term(t: &Expr) -> (BigRational, Expr) {
    match t.node() {
        Node::Neg(inner) => {
            let (c, b) = linear_term(inner);
            (-c, b)
        }
        Node::Mul(fs) if fs.len() == 2 => match fs[0].as_const() {
            Some(c) => (c.clone(), fs[1].clone()),
            None => (BigRational::one(), t.clone()),
        },
        _ => (BigRational::one(), t.clone()),
    }
}

fn term_key(base: &Expr) -> TermKey {
    match base.node() {
        Node::Var(v) => TermKey::Var(*v),
        _ => TermKey::Node(base.id()),
    }
}

/// Combines terms that are rational multiples of the same variable or of the
/// same shared node. Order of first appearance is kept.
fn collect_like_terms(terms: Vec<Expr>) -> Vec<Expr> {
    if terms.len() < 2 {
        return terms;
    }
    let mut slots: Vec<(BigRational, Expr, bool)> = Vec::with_capacity(terms.len());
    let mut index: std::collections::HashMap<TermKey, usize> = std::collections::HashMap::new();
    for t in terms {
        let (c, base) = linear_term(&t);
        let key = term_key(&base);
        match index.get(&key) {
            Some(&i) => {
                slots[i].0 += c;
                slots[i].2 = true;
            }
            None => {
                index.insert(key, slots.len());
                slots.push((c, t, false));
            }
        }
    }
    slots
        .into_iter()
        .filter_map(|(c, t, merged)| {
            if !merged {
                return Some(t);
            }
            if c.is_zero() {
                return None;
            }
            let (_, base) = linear_term(&t);
            Some(Expr::product([Expr::constant(c), base]))
        })
        .collect()
}

fn collect_vars(e: &Expr, out: &mut BTreeSet<VarRef>, seen: &mut std::collections::HashSet<usize>) {
    if !seen.insert(e.id()) {
        return;
    }
    match e.node() {
        Node::Const(_) => {}
        Node::Var(v) => {
            out.insert(*v);
        }
        Node::Add(v) | Node::Mul(v) => v.iter().for_each(|u| collect_vars(u, out, seen)),
        Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => collect_vars(a, out, seen),
        Node::Div(a, b) => {
            collect_vars(a, out, seen);
            collect_vars(b, out, seen);
        }
    }
}

pub(crate) fn pow_rational(c: &BigRational, exp: i32) -> BigRational {
    let mag = num_traits::pow(c.clone(), exp.unsigned_abs() as usize);
    if exp < 0 {
        mag.recip()
    } else {
        mag
    }
}

/// Variables of a list of expressions.
pub fn variables_of<'a, I: IntoIterator<Item = &'a Expr>>(exprs: I) -> BTreeSet<VarRef> {
    let mut out = BTreeSet::new();
    let mut seen = std::collections::HashSet::new();
    for e in exprs {
        collect_vars(e, &mut out, &mut seen);
    }
    out
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl From<VarRef> for Expr {
    fn from(v: VarRef) -> Self {
        Expr::var(v)
    }
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

// Precedence levels used by the printer: sum < product < unary < power < atom.
const PREC_SUM: u8 = 1;
const PREC_PROD: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Const(c) => {
            if c.is_negative() {
                PREC_UNARY
            } else if c.is_integer() {
                PREC_ATOM
            } else {
                PREC_PROD
            }
        }
        Node::Var(_) | Node::Call(..) => PREC_ATOM,
        Node::Add(_) => PREC_SUM,
        Node::Mul(_) | Node::Div(..) => PREC_PROD,
        Node::Neg(_) => PREC_UNARY,
        Node::Pow(..) => PREC_POW,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => {
                if c.is_negative() {
                    write!(f, "-")?;
                    let m = -c;
                    if m.is_integer() {
                        write!(f, "{}", format_rational(&m))
                    } else {
                        write!(f, "({})", format_rational(&m))
                    }
                } else {
                    write!(f, "{}", format_rational(c))
                }
            }
            Node::Var(v) => write!(f, "{v}"),
            Node::Add(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i == 0 {
                        write_operand(f, t, PREC_SUM)?;
                    } else if let Node::Neg(inner) = t.node() {
                        write!(f, " - ")?;
                        write_operand(f, inner, PREC_PROD)?;
                    } else {
                        write!(f, " + ")?;
                        write_operand(f, t, PREC_PROD)?;
                    }
                }
                Ok(())
            }
            Node::Mul(factors) => {
                for (i, t) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    // Right operands of `*` need strictly higher precedence to
                    // survive re-parsing of divisions like `a*(b/c)`.
                    write_operand(f, t, if i == 0 { PREC_PROD } else { PREC_UNARY })?;
                }
                Ok(())
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                write_operand(f, a, PREC_POW)
            }
            Node::Div(a, b) => {
                write_operand(f, a, PREC_PROD)?;
                write!(f, "/")?;
                write_operand(f, b, PREC_UNARY)
            }
            Node::Pow(a, k) => {
                write_operand(f, a, PREC_ATOM)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_rewrites_apply_at_construction() {
        let x = Expr::var(VarRef::x(0));
        assert!(Expr::add(&Expr::zero(), &x).id() == x.id());
        assert!(Expr::mul(&Expr::one(), &x).id() == x.id());
        assert!(Expr::mul(&Expr::zero(), &x).is_zero());
        assert!(Expr::pow(&x, 0).is_one());
        assert_eq!(Expr::div(&Expr::int(2), &Expr::int(4)).to_string(), "1/2");
    }

    #[test]
    fn division_by_zero_constant_is_kept() {
        let e = Expr::div(&Expr::int(1), &Expr::zero());
        assert!(matches!(e.node(), Node::Div(..)));
        assert_eq!(e.domain_constraints().len(), 1);
    }

    #[test]
    fn names_print_one_based() {
        assert_eq!(VarRef::x(0).to_string(), "x1");
        assert_eq!(VarRef::point(3, 1).to_string(), "w2");
        assert_eq!(VarRef::point(5, 0).to_string(), "p5_1");
        assert_eq!(VarRef::fiber(1, 2).to_string(), "eta3");
        assert_eq!(VarRef::param().to_string(), "t");
    }
}
