//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' exponent)?
//! exponent := integer | '-' integer | '(' '-'? integer ')'
//! atom   := integer | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers: `x1..xn`, `y`, `z`, `w` (point copies 0..3), `p<c>_<i>` for
//! further copies, `xi`, `eta`, `zeta` (fiber slots 0..2), `f<s>_<i>`, and `t`.
//! Rational literals are written `p/q` and fold to constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::{Block, Expr, Func, VarRef};

/// What the parser accepts as variables.
#[derive(Clone, Copy, Debug)]
pub struct ParseContext {
    /// Manifold dimension: component indices range over `1..=dim`.
    pub dim: usize,
    /// Number of point copies that may appear.
    pub copies: usize,
    /// Number of fiber slots that may appear.
    pub fiber_slots: usize,
    /// Whether `t` is allowed.
    pub allow_param: bool,
}

impl ParseContext {
    pub fn new(dim: usize, copies: usize) -> Self {
        ParseContext {
            dim,
            copies,
            fiber_slots: 0,
            allow_param: false,
        }
    }

    pub fn with_fibers(mut self, slots: usize) -> Self {
        self.fiber_slots = slots;
        self
    }

    pub fn with_param(mut self) -> Self {
        self.allow_param = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("component {index} of '{name}' is outside 1..={dim}")]
    DimensionOutOfRange { name: String, index: usize, dim: usize },
    #[error("exponent out of range")]
    BadExponent,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at position {pos}: {kind}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

/// Parses `text` into an expression.
pub fn parse(text: &str, ctx: &ParseContext) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ctx,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err(ParseErrorKind::UnexpectedChar(p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a ParseContext,
}

impl Parser<'_> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { pos: self.pos, kind }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(self.term()?.neg());
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                acc = Expr::mul(&acc, &rhs);
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                acc = Expr::div(&acc, &rhs);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            Ok(self.unary()?.neg())
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.exponent()?;
            Ok(Expr::pow(&base, k))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = self.eat(b'(');
        let negative = self.eat(b'-');
        let start = self.pos;
        let digits = self
            .digits()
            .ok_or_else(|| self.err(ParseErrorKind::Expected("integer exponent")))?;
        let mut k: i32 = digits.parse().map_err(|_| ParseError {
            pos: start,
            kind: ParseErrorKind::BadExponent,
        })?;
        if negative {
            k = -k;
        }
        if paren && !self.eat(b')') {
            return Err(self.err(ParseErrorKind::Expected("')'")));
        }
        Ok(k)
    }

    fn digits(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let c = self.peek().ok_or_else(|| self.err(ParseErrorKind::UnexpectedEnd))?;
        if c.is_ascii_digit() {
            let d = self.digits().unwrap();
            let v: BigInt = d.parse().expect("digits");
            return Ok(Expr::constant(BigRational::from_integer(v)));
        }
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err(ParseErrorKind::Expected("')'")));
            }
            return Ok(e);
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            if let Some(func) = Func::from_name(&word) {
                if !self.eat(b'(') {
                    return Err(self.err(ParseErrorKind::Expected("'(' after function name")));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err(ParseErrorKind::Expected("')'")));
                }
                return Ok(Expr::call(func, &arg));
            }
            let v = self.resolve(&word).map_err(|kind| ParseError { pos: start, kind })?;
            return Ok(Expr::var(v));
        }
        Err(self.err(ParseErrorKind::UnexpectedChar(c as char)))
    }

    fn resolve(&self, word: &str) -> Result<VarRef, ParseErrorKind> {
        let unknown = || ParseErrorKind::UnknownVariable(word.to_string());
        if word == "t" {
            return if self.ctx.allow_param {
                Ok(VarRef::param())
            } else {
                Err(unknown())
            };
        }
        let (block, idx) = split_name(word).ok_or_else(unknown)?;
        let index: usize = idx.parse().map_err(|_| unknown())?;
        match block {
            Block::Point(c) if (c as usize) >= self.ctx.copies => return Err(unknown()),
            Block::Fiber(s) if (s as usize) >= self.ctx.fiber_slots => return Err(unknown()),
            _ => {}
        }
        if index == 0 || index > self.ctx.dim {
            return Err(ParseErrorKind::DimensionOutOfRange {
                name: word.to_string(),
                index,
                dim: self.ctx.dim,
            });
        }
        Ok(VarRef {
            block,
            index: index - 1,
        })
    }
}

fn split_name(word: &str) -> Option<(Block, &str)> {
    // Longest prefixes first so `xi1` is not read as `x` + `i1`.
    const NAMED: [(&str, Block); 7] = [
        ("zeta", Block::Fiber(2)),
        ("eta", Block::Fiber(1)),
        ("xi", Block::Fiber(0)),
        ("x", Block::Point(0)),
        ("y", Block::Point(1)),
        ("z", Block::Point(2)),
        ("w", Block::Point(3)),
    ];
    for (prefix, block) in NAMED {
        if let Some(rest) = word.strip_prefix(prefix) {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return Some((block, rest));
            }
        }
    }
    for (prefix, point) in [("p", true), ("f", false)] {
        if let Some(rest) = word.strip_prefix(prefix) {
            let (c, i) = rest.split_once('_')?;
            let c: u8 = c.parse().ok()?;
            if i.is_empty() || !i.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let block = if point { Block::Point(c) } else { Block::Fiber(c) };
            return Some((block, i));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Node;

    fn ctx() -> ParseContext {
        ParseContext::new(3, 2).with_fibers(1).with_param()
    }

    #[test]
    fn sum_of_two_blocks() {
        let e = parse("x1 + y1", &ctx()).unwrap();
        match e.node() {
            Node::Add(terms) => {
                assert!(matches!(terms[0].node(), Node::Var(v) if *v == VarRef::x(0)));
                assert!(matches!(terms[1].node(), Node::Var(v) if *v == VarRef::y(0)));
            }
            other => panic!("expected sum, got {other:?}"),
        }
    }

    #[test]
    fn precedence_and_powers() {
        let e = parse("-x1^2 + 2*y2/3", &ctx()).unwrap();
        assert_eq!(e.to_string(), "-x1^2 + 2*y2/3");
        let e = parse("x1^(-2)", &ctx()).unwrap();
        assert_eq!(e.to_string(), "x1^(-2)");
        assert_eq!(parse("3/6", &ctx()).unwrap().to_string(), "1/2");
    }

    #[test]
    fn fibers_functions_and_param() {
        assert!(parse("exp(xi1) * t + sin(cos(x3))", &ctx()).is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("x1 + z1", &ctx()).unwrap_err();
        assert_eq!(err.pos, 5);
        assert!(matches!(err.kind, ParseErrorKind::UnknownVariable(_)));
        let err = parse("x4", &ctx()).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::DimensionOutOfRange { index: 4, .. }));
        let err = parse("x1 + ", &ctx()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        let err = parse("(x1", &ctx()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Expected("')'"));
        assert!(parse("x1 $", &ctx()).is_err());
    }

    #[test]
    fn generic_copy_names() {
        let c = ParseContext::new(2, 6).with_fibers(5);
        let e = parse("p5_2 * f4_1", &c).unwrap();
        let vars: Vec<_> = e.variables().into_iter().collect();
        assert_eq!(vars, vec![VarRef::point(5, 1), VarRef::fiber(4, 0)]);
    }
}
