//! Rational normal form for display: a quotient of expanded polynomials over
//! Q, with elementary function calls treated as opaque atoms.
//!
//! The numerator vanishes exactly when the expression is identically zero as
//! a rational function of its atoms. Domain information is lost (`0/x`
//! normalizes to `0`), so this is a presentation aid and not a replacement
//! for evaluation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Expr, Func, Node, VarRef};

/// Terms allowed in any intermediate polynomial before giving up.
const TERM_BUDGET: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Atom {
    Var(VarRef),
    Call(u8, String),
}

type Mono = Vec<(Atom, u32)>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
struct Poly(BTreeMap<Mono, BigRational>);

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out: BTreeMap<Atom, u32> = a.iter().cloned().collect();
    for (v, e) in b {
        *out.entry(v.clone()).or_insert(0) += e;
    }
    out.into_iter().collect()
}

/// `a / b` when every exponent of `b` fits in `a`.
fn mono_div(a: &Mono, b: &Mono) -> Option<Mono> {
    let mut out: BTreeMap<Atom, u32> = a.iter().cloned().collect();
    for (v, e) in b {
        let have = out.get_mut(v)?;
        *have = have.checked_sub(*e)?;
    }
    Some(out.into_iter().filter(|(_, e)| *e > 0).collect())
}

/// Lexicographic order on exponent vectors, atoms in their natural order.
fn lex(a: &Mono, b: &Mono) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match ea.cmp(eb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    o => return o,
                },
            },
        }
    }
}

impl Poly {
    fn constant(c: BigRational) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.0.insert(Vec::new(), c);
        }
        p
    }

    fn atom(a: Atom) -> Poly {
        Poly(BTreeMap::from([(vec![(a, 1)], BigRational::one())]))
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => self.0.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Mono, c: BigRational) {
        let slot = self.0.entry(m.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&m);
        }
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::default();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    fn mul(&self, other: &Poly) -> Option<Poly> {
        if self.0.len() * other.0.len() > TERM_BUDGET * 4 {
            return None;
        }
        let mut out = Poly::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        (out.0.len() <= TERM_BUDGET).then_some(out)
    }

    fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.0.iter().max_by(|a, b| lex(a.0, b.0))
    }

    /// Exact quotient, or `None` if `d` does not divide `self`.
    fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut r = self.clone();
        let mut q = Poly::default();
        let mut steps = 0;
        while let Some((rm, rc)) = r.leading() {
            steps += 1;
            if steps > TERM_BUDGET {
                return None;
            }
            let m = mono_div(rm, &dm)?;
            let c = rc / &dc;
            let t = Poly(BTreeMap::from([(m, c)]));
            r = r.add(&t.mul(d)?.scale(&-BigRational::one()));
            q = q.add(&t);
        }
        Some(q)
    }

    /// Atoms dividing every term, with their minimal exponent.
    fn monomial_content(&self) -> Mono {
        let mut iter = self.0.keys();
        let Some(first) = iter.next() else { return Vec::new() };
        let mut common: BTreeMap<Atom, u32> = first.iter().cloned().collect();
        for m in iter {
            let here: BTreeMap<&Atom, u32> = m.iter().map(|(a, e)| (a, *e)).collect();
            common = common
                .into_iter()
                .filter_map(|(a, e)| here.get(&a).map(|h| (a, e.min(*h))))
                .collect();
        }
        common.into_iter().collect()
    }

    fn div_mono(&self, m: &Mono) -> Poly {
        Poly(
            self.0
                .iter()
                .map(|(k, c)| (mono_div(k, m).expect("content divides"), c.clone()))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Frac {
    num: Poly,
    den: Poly,
}

impl Frac {
    fn poly(p: Poly) -> Frac {
        Frac {
            num: p,
            den: Poly::constant(BigRational::one()),
        }
    }

    fn reduce(mut self) -> Option<Frac> {
        if self.num.is_zero() {
            return Some(Frac::poly(Poly::default()));
        }
        if self.den.as_constant().is_none() {
            if let Some(q) = self.num.div_exact(&self.den) {
                return Some(Frac::poly(q));
            }
            let content = mono_content_pair(&self.num, &self.den);
            if !content.is_empty() {
                self.num = self.num.div_mono(&content);
                self.den = self.den.div_mono(&content);
            }
        }
        let lead = self.den.leading()?.1.clone();
        if !lead.is_one() {
            let inv = BigRational::one() / lead;
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
        Some(self)
    }

    fn add(&self, other: &Frac) -> Option<Frac> {
        if self.den == other.den {
            return Frac {
                num: self.num.add(&other.num),
                den: self.den.clone(),
            }
            .reduce();
        }
        if let Some(q) = other.den.div_exact(&self.den) {
            return Frac {
                num: self.num.mul(&q)?.add(&other.num),
                den: other.den.clone(),
            }
            .reduce();
        }
        if let Some(q) = self.den.div_exact(&other.den) {
            return Frac {
                num: self.num.add(&other.num.mul(&q)?),
                den: self.den.clone(),
            }
            .reduce();
        }
        Frac {
            num: self.num.mul(&other.den)?.add(&other.num.mul(&self.den)?),
            den: self.den.mul(&other.den)?,
        }
        .reduce()
    }

    fn mul(&self, other: &Frac) -> Option<Frac> {
        Frac {
            num: self.num.mul(&other.num)?,
            den: self.den.mul(&other.den)?,
        }
        .reduce()
    }

    fn inv(&self) -> Option<Frac> {
        if self.num.is_zero() {
            return None;
        }
        Frac {
            num: self.den.clone(),
            den: self.num.clone(),
        }
        .reduce()
    }
}

fn mono_content_pair(a: &Poly, b: &Poly) -> Mono {
    let ca: BTreeMap<Atom, u32> = a.monomial_content().into_iter().collect();
    b.monomial_content()
        .into_iter()
        .filter_map(|(v, e)| ca.get(&v).map(|h| (v, e.min(*h))))
        .filter(|(_, e)| *e > 0)
        .collect()
}

struct Normalizer {
    cache: HashMap<*const Node, Option<Frac>>,
    calls: HashMap<Atom, (Func, Expr)>,
}

fn func_tag(f: Func) -> u8 {
    match f {
        Func::Exp => 0,
        Func::Log => 1,
        Func::Sin => 2,
        Func::Cos => 3,
    }
}

impl Normalizer {
    fn frac(&mut self, e: &Expr) -> Option<Frac> {
        let key = std::sync::Arc::as_ptr(&e.0);
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        let out = self.compute(e);
        self.cache.insert(key, out.clone());
        out
    }

    fn compute(&mut self, e: &Expr) -> Option<Frac> {
        match e.node() {
            Node::Const(c) => Some(Frac::poly(Poly::constant(c.clone()))),
            Node::Var(v) => Some(Frac::poly(Poly::atom(Atom::Var(*v)))),
            Node::Add(terms) => {
                let mut acc = Frac::poly(Poly::default());
                for t in terms {
                    acc = acc.add(&self.frac(t)?)?;
                }
                Some(acc)
            }
            Node::Mul(factors) => {
                let mut acc = Frac::poly(Poly::constant(BigRational::one()));
                for f in factors {
                    acc = acc.mul(&self.frac(f)?)?;
                }
                Some(acc)
            }
            Node::Neg(a) => {
                let f = self.frac(a)?;
                Some(Frac {
                    num: f.num.scale(&-BigRational::one()),
                    den: f.den,
                })
            }
            Node::Div(a, b) => self.frac(a)?.mul(&self.frac(b)?.inv()?),
            Node::Pow(a, k) => {
                let base = self.frac(a)?;
                let base = if *k < 0 { base.inv()? } else { base };
                let mut acc = Frac::poly(Poly::constant(BigRational::one()));
                for _ in 0..k.unsigned_abs() {
                    acc = acc.mul(&base)?;
                }
                Some(acc)
            }
            Node::Call(f, a) => {
                let arg = self.frac(a).map_or_else(|| a.clone(), |fr| to_expr(&fr, &self.calls));
                let atom = Atom::Call(func_tag(*f), arg.to_string());
                self.calls.entry(atom.clone()).or_insert((*f, arg));
                Some(Frac::poly(Poly::atom(atom)))
            }
        }
    }
}

fn atom_expr(a: &Atom, calls: &HashMap<Atom, (Func, Expr)>) -> Expr {
    match a {
        Atom::Var(v) => Expr::var(*v),
        Atom::Call(..) => {
            let (f, arg) = &calls[a];
            Expr::call(*f, arg)
        }
    }
}

fn poly_expr(p: &Poly, calls: &HashMap<Atom, (Func, Expr)>) -> Expr {
    // Highest degree first reads more naturally.
    let mut terms: Vec<(&Mono, &BigRational)> = p.0.iter().collect();
    terms.sort_by(|a, b| lex(b.0, a.0));
    Expr::sum(terms.into_iter().map(|(m, c)| {
        let factors = m.iter().map(|(a, e)| Expr::pow(&atom_expr(a, calls), *e as i32));
        if c.is_negative() {
            Expr::product(std::iter::once(Expr::constant(-c)).chain(factors)).neg()
        } else {
            Expr::product(std::iter::once(Expr::constant(c.clone())).chain(factors))
        }
    }))
}

fn to_expr(f: &Frac, calls: &HashMap<Atom, (Func, Expr)>) -> Expr {
    let num = poly_expr(&f.num, calls);
    match f.den.as_constant() {
        Some(c) => Expr::div(&num, &Expr::constant(c)),
        None => Expr::div(&num, &poly_expr(&f.den, calls)),
    }
}

impl Expr {
    /// Rational normal form, or `None` if the expansion grows past a fixed
    /// budget or divides by an expression that is identically zero.
    pub fn normalized(&self) -> Option<Expr> {
        let mut n = Normalizer {
            cache: HashMap::new(),
            calls: HashMap::new(),
        };
        let f = n.frac(self)?;
        Some(to_expr(&f, &n.calls))
    }

    /// [`Expr::normalized`] falling back to the expression itself.
    pub fn simplified(&self) -> Expr {
        self.normalized().unwrap_or_else(|| self.clone())
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, ParseContext};

    fn norm(s: &str) -> String {
        parse(s, &ParseContext::new(3, 1)).unwrap().simplified().to_string()
    }

    #[test]
    fn cancels_to_zero() {
        assert_eq!(norm("1/x1 - 1/x1"), "0");
        assert_eq!(norm("0/x1"), "0");
        assert_eq!(norm("(x1 + x2)^2 - x1^2 - 2*x1*x2 - x2^2"), "0");
        assert_eq!(norm("1/(x1 + 1) - 1/(1 + x1)"), "0");
        assert_eq!(norm("sin(x1 + 0) - sin(x1)"), "0");
    }

    #[test]
    fn divides_when_exact() {
        assert_eq!(norm("(x1^2 - x2^2)/(x1 - x2)"), norm("x1 + x2"));
        assert_eq!(norm("(x1*x2)/(x1*x3)"), norm("x2/x3"));
    }

    #[test]
    fn keeps_value() {
        use crate::expr::identity::{equiv_components, IdentityConfig};
        use crate::expr::EvalMode;
        let cfg = IdentityConfig::default().with_mode(EvalMode::Float);
        for s in [
            "x1/(x2 + 1) + x2/(x1 - 3)",
            "exp(x1)*(x1 + 1)/x2",
            "(x1 - x2)^-2 * (x1^2 - x2^2)",
        ] {
            let e = parse(s, &ParseContext::new(3, 1)).unwrap();
            assert!(
                equiv_components(std::slice::from_ref(&e), &[e.simplified()], &[], &cfg).is_equal(),
                "{s}"
            );
        }
    }
}
