//! Exact rational and floating evaluation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::{format_rational, pow_rational, Expr, Func, Node, VarRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    #[default]
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{}", format_rational(r)),
            Value::Float(x) => write!(f, "{x:e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("transcendental function {0}() cannot be evaluated exactly")]
    Transcendental(&'static str),
    #[error("variable {0} has no value")]
    Unbound(VarRef),
}

/// An assignment of rational values to variables.
///
/// Float evaluation converts the rationals to `f64`, so the same point drives
/// both modes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SamplePoint {
    values: BTreeMap<VarRef, BigRational>,
}

impl SamplePoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, v: VarRef, value: BigRational) {
        self.values.insert(v, value);
    }

    pub fn with(mut self, v: VarRef, value: BigRational) -> Self {
        self.set(v, value);
        self
    }

    pub fn get(&self, v: &VarRef) -> Option<&BigRational> {
        self.values.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarRef, &BigRational)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl fmt::Display for SamplePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, r)) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}={}", format_rational(r))?;
        }
        Ok(())
    }
}

/// Arithmetic needed by the evaluator.
pub trait Scalar: Clone + Sized {
    fn from_rational(r: &BigRational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, other: &Self) -> Result<Self, EvalError>;
    fn powi(&self, k: i32) -> Result<Self, EvalError>;
    fn call(&self, func: Func) -> Result<Self, EvalError>;
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, other: &Self) -> Result<Self, EvalError> {
        if other.is_zero() {
            Err(EvalError::Domain("division by zero".into()))
        } else {
            Ok(self / other)
        }
    }
    fn powi(&self, k: i32) -> Result<Self, EvalError> {
        if k < 0 && self.is_zero() {
            return Err(EvalError::Domain("negative power of zero".into()));
        }
        Ok(pow_rational(self, k))
    }
    fn call(&self, func: Func) -> Result<Self, EvalError> {
        Err(EvalError::Transcendental(func.name()))
    }
}

impl Scalar for f64 {
    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, other: &Self) -> Result<Self, EvalError> {
        if *other == 0.0 {
            Err(EvalError::Domain("division by zero".into()))
        } else {
            Ok(self / other)
        }
    }
    fn powi(&self, k: i32) -> Result<Self, EvalError> {
        if k < 0 && *self == 0.0 {
            return Err(EvalError::Domain("negative power of zero".into()));
        }
        Ok(f64::powi(*self, k))
    }
    fn call(&self, func: Func) -> Result<Self, EvalError> {
        match func {
            Func::Exp => Ok(self.exp()),
            Func::Log if *self <= 0.0 => Err(EvalError::Domain("log of non-positive value".into())),
            Func::Log => Ok(self.ln()),
            Func::Sin => Ok(self.sin()),
            Func::Cos => Ok(self.cos()),
        }
    }
}

/// Evaluates expressions at one point, caching shared subtrees so a batch of
/// components built from common pieces is evaluated once per node.
pub struct Evaluator<'p, T: Scalar> {
    point: &'p SamplePoint,
    vars: HashMap<VarRef, T>,
    memo: HashMap<usize, T>,
}

impl<'p, T: Scalar> Evaluator<'p, T> {
    pub fn new(point: &'p SamplePoint) -> Self {
        let vars = point.values.iter().map(|(v, r)| (*v, T::from_rational(r))).collect();
        Evaluator {
            point,
            vars,
            memo: HashMap::new(),
        }
    }

    pub fn point(&self) -> &SamplePoint {
        self.point
    }

    pub fn eval(&mut self, e: &Expr) -> Result<T, EvalError> {
        let shared = e.is_shared();
        if shared {
            if let Some(v) = self.memo.get(&e.id()) {
                return Ok(v.clone());
            }
        }
        let v = match e.node() {
            Node::Const(c) => T::from_rational(c),
            Node::Var(u) => self.vars.get(u).cloned().ok_or(EvalError::Unbound(*u))?,
            Node::Add(terms) => {
                let mut acc = self.eval(&terms[0])?;
                for t in &terms[1..] {
                    acc = acc.add(&self.eval(t)?);
                }
                acc
            }
            Node::Mul(factors) => {
                let mut acc = self.eval(&factors[0])?;
                for t in &factors[1..] {
                    acc = acc.mul(&self.eval(t)?);
                }
                acc
            }
            Node::Neg(a) => self.eval(a)?.neg(),
            Node::Div(a, b) => {
                let den = self.eval(b)?;
                self.eval(a)?.div(&den)?
            }
            Node::Pow(a, k) => self.eval(a)?.powi(*k)?,
            Node::Call(f, a) => self.eval(a)?.call(*f)?,
        };
        if shared {
            self.memo.insert(e.id(), v.clone());
        }
        Ok(v)
    }
}

impl Expr {
    pub fn eval_exact(&self, point: &SamplePoint) -> Result<BigRational, EvalError> {
        Evaluator::<BigRational>::new(point).eval(self)
    }

    pub fn eval_float(&self, point: &SamplePoint) -> Result<f64, EvalError> {
        Evaluator::<f64>::new(point).eval(self)
    }

    pub fn eval(&self, point: &SamplePoint, mode: EvalMode) -> Result<Value, EvalError> {
        match mode {
            EvalMode::Exact => self.eval_exact(point).map(Value::Exact),
            EvalMode::Float => self.eval_float(point).map(Value::Float),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, ParseContext};
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn p(s: &str) -> Expr {
        parse(s, &ParseContext::new(3, 2)).unwrap()
    }

    #[test]
    fn exact_product() {
        let pt = SamplePoint::new()
            .with(VarRef::x(0), q(2, 3))
            .with(VarRef::y(1), q(3, 1));
        assert_eq!(p("x1*y2").eval_exact(&pt).unwrap(), q(2, 1));
    }

    #[test]
    fn division_by_zero_is_a_domain_error() {
        let pt = SamplePoint::new().with(VarRef::x(0), q(0, 1));
        assert!(matches!(p("1/x1").eval_exact(&pt), Err(EvalError::Domain(_))));
        assert!(matches!(p("1/x1").eval_float(&pt), Err(EvalError::Domain(_))));
    }

    #[test]
    fn float_mode_handles_transcendentals() {
        let pt = SamplePoint::new().with(VarRef::x(0), q(0, 1));
        assert_eq!(p("exp(x1)").eval_float(&pt).unwrap(), 1.0);
        assert_eq!(p("exp(x1)").eval_exact(&pt), Err(EvalError::Transcendental("exp")));
    }

    #[test]
    fn unbound_variable() {
        assert_eq!(
            p("y3").eval_exact(&SamplePoint::new()),
            Err(EvalError::Unbound(VarRef::y(2)))
        );
    }
}
