//! Randomized exact identity testing.
//!
//! Two expressions (or two lists of expressions, componentwise) are compared
//! at seeded random rational points. Exact mode compares rationals with no
//! rounding, so a single disagreement is a proof of inequality and agreement
//! on all trials is overwhelming evidence of an identity for rational
//! functions of bounded degree.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::eval::Scalar;
use super::{variables_of, EvalError, EvalMode, Evaluator, Expr, SamplePoint, Value, VarRef};

/// Sampling and comparison parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityConfig {
    pub trials: usize,
    pub seed: u64,
    pub mode: EvalMode,
    /// Relative tolerance for float mode: `|a-b| <= tol * max(1, |a|, |b|)`.
    pub tol: f64,
    /// Coordinates are drawn from `[-bound, bound]`.
    pub bound: i64,
    /// Largest denominator of a sampled coordinate.
    pub max_den: i64,
    /// Resampling budget per trial when a point violates a domain constraint.
    pub max_attempts: u64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig {
            trials: 32,
            seed: 0,
            mode: EvalMode::Exact,
            tol: 1e-9,
            bound: 7,
            max_den: 16,
            max_attempts: 64,
        }
    }
}

impl IdentityConfig {
    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: EvalMode) -> Self {
        self.mode = mode;
        self
    }
}

/// A point where two sides disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// Index of the first disagreeing component.
    pub component: usize,
    pub point: SamplePoint,
    pub lhs: Value,
    pub rhs: Value,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "component {} differs at [{}]: {} vs {}",
            self.component, self.point, self.lhs, self.rhs
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Equal,
    Counterexample(Witness),
    /// No admissible sample point was found, or evaluation failed otherwise.
    Inconclusive(String),
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Counterexample(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equal => write!(f, "equal"),
            Verdict::Counterexample(w) => write!(f, "counterexample: {w}"),
            Verdict::Inconclusive(why) => write!(f, "inconclusive: {why}"),
        }
    }
}

/// Tests `e1 == e2` with the default sampling box.
pub fn equiv_random(e1: &Expr, e2: &Expr, trials: usize, seed: u64) -> Verdict {
    let cfg = IdentityConfig::default().with_trials(trials).with_seed(seed);
    equiv_components(std::slice::from_ref(e1), std::slice::from_ref(e2), &[], &cfg)
}

/// Tests that every expression vanishes identically.
pub fn check_zero_all(exprs: &[Expr], constraints: &[Expr], cfg: &IdentityConfig) -> Verdict {
    let zeros = vec![Expr::zero(); exprs.len()];
    equiv_components(exprs, &zeros, constraints, cfg)
}

/// Componentwise comparison of two equally long lists.
///
/// `constraints` are extra expressions that must be nonzero at every sample
/// point (for example the domain of a group law). Points where any side or
/// constraint hits a domain error are resampled.
pub fn equiv_components(lhs: &[Expr], rhs: &[Expr], constraints: &[Expr], cfg: &IdentityConfig) -> Verdict {
    assert_eq!(lhs.len(), rhs.len(), "component lists differ in length");
    assert!(cfg.trials >= 1, "at least one trial is required");
    let vars: Vec<VarRef> = variables_of(lhs.iter().chain(rhs).chain(constraints))
        .into_iter()
        .collect();
    let outcomes: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(t as u64, &vars, lhs, rhs, constraints, cfg))
        .collect();
    let mut skipped = 0;
    for o in outcomes {
        match o {
            Trial::Agree => {}
            Trial::Disagree(w) => return Verdict::Counterexample(w),
            Trial::Skipped => skipped += 1,
            Trial::Failed(e) => return Verdict::Inconclusive(e.to_string()),
        }
    }
    if skipped > 0 {
        Verdict::Inconclusive(format!(
            "{skipped} of {} trials found no point satisfying the domain constraints",
            cfg.trials
        ))
    } else {
        Verdict::Equal
    }
}

enum Trial {
    Agree,
    Disagree(Witness),
    Skipped,
    Failed(EvalError),
}

/// Draws a rational in `[-bound, bound]` with denominator at most `max_den`.
pub fn sample_rational(rng: &mut ChaCha8Rng, bound: i64, max_den: i64) -> BigRational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(-bound * den..=bound * den);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The deterministic sample point for one trial and attempt.
pub fn sample_point(vars: &[VarRef], trial: u64, attempt: u64, cfg: &IdentityConfig) -> SamplePoint {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial * 1024 + attempt);
    let mut p = SamplePoint::new();
    for v in vars {
        p.set(*v, sample_rational(&mut rng, cfg.bound, cfg.max_den));
    }
    p
}

fn run_trial(
    trial: u64,
    vars: &[VarRef],
    lhs: &[Expr],
    rhs: &[Expr],
    constraints: &[Expr],
    cfg: &IdentityConfig,
) -> Trial {
    for attempt in 0..cfg.max_attempts {
        let point = sample_point(vars, trial, attempt, cfg);
        let outcome = match cfg.mode {
            EvalMode::Exact => compare_at::<BigRational>(&point, lhs, rhs, constraints, |a, b| a == b),
            EvalMode::Float => compare_at::<f64>(&point, lhs, rhs, constraints, |a, b| {
                (a - b).abs() <= cfg.tol * 1f64.max(a.abs()).max(b.abs())
            }),
        };
        match outcome {
            Err(EvalError::Domain(_)) => continue,
            Err(e) => return Trial::Failed(e),
            Ok(None) => return Trial::Agree,
            Ok(Some(w)) => return Trial::Disagree(w),
        }
    }
    Trial::Skipped
}

trait IntoValue {
    fn into_value(self) -> Value;
    fn is_admissible(&self) -> bool;
}

impl IntoValue for BigRational {
    fn into_value(self) -> Value {
        Value::Exact(self)
    }
    fn is_admissible(&self) -> bool {
        true
    }
}

impl IntoValue for f64 {
    fn into_value(self) -> Value {
        Value::Float(self)
    }
    fn is_admissible(&self) -> bool {
        self.is_finite()
    }
}

fn compare_at<T: Scalar + IntoValue + ZeroTest>(
    point: &SamplePoint,
    lhs: &[Expr],
    rhs: &[Expr],
    constraints: &[Expr],
    same: impl Fn(&T, &T) -> bool,
) -> Result<Option<Witness>, EvalError> {
    let mut ev = Evaluator::<T>::new(point);
    for c in constraints {
        if ev.eval(c)?.is_zero_value() {
            return Err(EvalError::Domain("constraint vanishes".into()));
        }
    }
    // Evaluate everything first so a domain error anywhere forces a resample
    // rather than a spurious verdict on the components seen so far.
    let mut pairs = Vec::with_capacity(lhs.len());
    for (a, b) in lhs.iter().zip(rhs) {
        let va = ev.eval(a)?;
        let vb = ev.eval(b)?;
        if !va.is_admissible() || !vb.is_admissible() {
            return Err(EvalError::Domain("non-finite value".into()));
        }
        pairs.push((va, vb));
    }
    for (i, (va, vb)) in pairs.into_iter().enumerate() {
        if !same(&va, &vb) {
            return Ok(Some(Witness {
                component: i,
                point: point.clone(),
                lhs: va.into_value(),
                rhs: vb.into_value(),
            }));
        }
    }
    Ok(None)
}

trait ZeroTest {
    fn is_zero_value(&self) -> bool;
}

impl ZeroTest for BigRational {
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl ZeroTest for f64 {
    fn is_zero_value(&self) -> bool {
        *self == 0.0
    }
}
