//! Named verdicts produced by verification routines.

use crate::expr::identity::Verdict;

/// What outcome a check is looking for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    /// The identity must hold on every sample.
    Identity,
    /// A witness of failure must be found (negative controls).
    Counterexample,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    /// Stable identifier, e.g. `group.associativity`.
    pub id: String,
    pub verdict: Verdict,
    pub expect: Expect,
}

impl Check {
    pub fn new(id: impl Into<String>, verdict: Verdict) -> Self {
        Check {
            id: id.into(),
            verdict,
            expect: Expect::Identity,
        }
    }

    pub fn expect_counterexample(id: impl Into<String>, verdict: Verdict) -> Self {
        Check {
            id: id.into(),
            verdict,
            expect: Expect::Counterexample,
        }
    }

    pub fn passed(&self) -> bool {
        match self.expect {
            Expect::Identity => self.verdict.is_equal(),
            Expect::Counterexample => self.verdict.witness().is_some(),
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(Check::passed)
}
