//! Versioned reports with deterministic ordering.

use serde::Serialize;
use serde_json::Value;

use crate::check::{Check, Expect};
use crate::cohomology::LocalizedComplex;
use crate::expr::identity::{IdentityConfig, Verdict};
use crate::expr::EvalMode;

pub const SCHEMA: u32 = 1;

/// One verified statement. `id` is a stable anchor listed in the README.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub id: String,
    pub subject: String,
    pub passed: bool,
    pub expect: &'static str,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<f64>,
}

impl Record {
    pub fn from_check(subject: impl Into<String>, check: &Check) -> Self {
        let (verdict, witness) = match &check.verdict {
            Verdict::Equal => ("equal".to_string(), None),
            Verdict::Counterexample(w) => ("counterexample".to_string(), Some(w.to_string())),
            Verdict::Inconclusive(why) => ("inconclusive".to_string(), Some(why.clone())),
        };
        Record {
            id: check.id.clone(),
            subject: subject.into(),
            passed: check.passed(),
            expect: match check.expect {
                Expect::Identity => "identity",
                Expect::Counterexample => "counterexample",
            },
            verdict,
            witness,
            detail: None,
            millis: None,
        }
    }

    pub fn verdict(id: &str, subject: impl Into<String>, verdict: Verdict) -> Self {
        Self::from_check(subject, &Check::new(id, verdict))
    }

    pub fn control(id: &str, subject: impl Into<String>, verdict: Verdict) -> Self {
        Self::from_check(subject, &Check::expect_counterexample(id, verdict))
    }

    /// An exact comparison that is not a sampled identity.
    pub fn fact(id: &str, subject: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Record {
            id: id.into(),
            subject: subject.into(),
            passed,
            expect: "match",
            verdict: if passed { "match" } else { "mismatch" }.into(),
            witness: None,
            detail: Some(detail.into()),
            millis: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub seed: u64,
    pub trials: usize,
    pub mode: EvalMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl From<&IdentityConfig> for Settings {
    fn from(cfg: &IdentityConfig) -> Self {
        Settings {
            seed: cfg.seed,
            trials: cfg.trials,
            mode: cfg.mode,
            tol: (cfg.mode == EvalMode::Float).then_some(cfg.tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub subject: String,
    pub settings: Settings,
    pub passed: bool,
    pub records: Vec<Record>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
    #[serde(skip)]
    pub output_markdown: Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, subject: impl Into<String>, cfg: &IdentityConfig) -> Self {
        Report {
            schema: SCHEMA,
            command: command.into(),
            subject: subject.into(),
            settings: cfg.into(),
            passed: true,
            records: Vec::new(),
            output: None,
            output_markdown: None,
        }
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = Record>) {
        self.records.extend(records);
        self.passed = self.records.iter().all(|r| r.passed);
    }

    pub fn set_output(&mut self, json: Value, markdown: String) {
        self.output = Some(json);
        self.output_markdown = Some(markdown);
    }

    /// Orders records by anchor and subject. The sort is stable, so records
    /// sharing both keep their generation order.
    pub fn finish(&mut self) {
        self.records
            .sort_by(|a, b| (&a.id, &a.subject).cmp(&(&b.id, &b.subject)));
        self.passed = self.records.iter().all(|r| r.passed);
    }

    fn without_timings(&self) -> Report {
        let mut r = self.clone();
        for rec in &mut r.records {
            rec.millis = None;
        }
        r
    }

    pub fn to_json(&self, timings: bool) -> String {
        let r = if timings { self.clone() } else { self.without_timings() };
        let mut s = serde_json::to_string_pretty(&r).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self, timings: bool) -> String {
        let mut s = format!("# llg {} on {}\n\n", self.command, self.subject);
        s.push_str(&format!(
            "seed {}, trials {}, mode {}: **{}**\n\n",
            self.settings.seed,
            self.settings.trials,
            match self.settings.mode {
                EvalMode::Exact => "exact",
                EvalMode::Float => "float",
            },
            if self.passed { "PASS" } else { "FAIL" }
        ));
        if let Some(out) = &self.output_markdown {
            s.push_str(out);
            s.push('\n');
        }
        if !self.records.is_empty() {
            s.push_str(if timings {
                "| id | subject | result | detail | ms |\n|---|---|---|---|---|\n"
            } else {
                "| id | subject | result | detail |\n|---|---|---|---|\n"
            });
            for r in &self.records {
                let detail = r
                    .witness
                    .as_deref()
                    .or(r.detail.as_deref())
                    .unwrap_or("")
                    .replace('|', "\\|");
                let result = if r.passed {
                    format!("pass ({})", r.verdict)
                } else {
                    format!("FAIL ({})", r.verdict)
                };
                s.push_str(&format!("| `{}` | {} | {} | {} |", r.id, r.subject, result, detail));
                if timings {
                    s.push_str(&format!(" {:.1} |", r.millis.unwrap_or(0.0)));
                }
                s.push('\n');
            }
        }
        s
    }
}

/// Betti numbers of a localized complex, in the emitted JSON shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub complex: String,
    pub coefficients: String,
    pub dims: Vec<usize>,
}

impl BettiTable {
    pub fn new(c: &LocalizedComplex, dims: Vec<usize>) -> Self {
        BettiTable {
            complex: c.label.clone(),
            coefficients: c.coefficients.clone(),
            dims,
        }
    }

    pub fn to_markdown(&self) -> String {
        let head: Vec<String> = (0..self.dims.len()).map(|k| format!("H^{k}")).collect();
        let vals: Vec<String> = self.dims.iter().map(usize::to_string).collect();
        format!(
            "complex `{}`, coefficients `{}`\n\n| {} |\n|{}|\n| {} |\n",
            self.complex,
            self.coefficients,
            head.join(" | "),
            vec!["---"; head.len()].join("|"),
            vals.join(" | ")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::identity::Verdict;

    #[test]
    fn records_sort_and_timings_drop() {
        let cfg = IdentityConfig::default();
        let mut r = Report::new("verify", "demo", &cfg);
        let mut late = Record::verdict("b.check", "x", Verdict::Equal);
        late.millis = Some(3.5);
        r.extend([late, Record::fact("a.check", "y", false, "1 != 2")]);
        r.finish();
        assert_eq!(r.records[0].id, "a.check");
        assert!(!r.passed);
        let json = r.to_json(false);
        assert!(json.contains("\"schema\": 1"));
        assert!(!json.contains("millis"));
        assert!(r.to_json(true).contains("millis"));
        assert!(r.to_markdown(false).contains("FAIL (mismatch)"));
    }

    #[test]
    fn controls_pass_on_witness() {
        let rec = Record::control("c", "s", Verdict::Equal);
        assert!(!rec.passed);
        assert_eq!(rec.expect, "counterexample");
    }

    #[test]
    fn betti_markdown() {
        let t = BettiTable {
            complex: "ilhc".into(),
            coefficients: "trivial".into(),
            dims: vec![1, 2, 1],
        };
        assert!(t.to_markdown().contains("| 1 | 2 | 1 |"));
        assert_eq!(serde_json::to_value(&t).unwrap()["dims"], serde_json::json!([1, 2, 1]));
    }
}
