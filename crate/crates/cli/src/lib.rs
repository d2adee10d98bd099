//! The `llg` command line: load a definition, run a command, write a report.
//!
//! Exit status is 0 when every record passes, 1 when a check fails (the
//! report is still written) and 2 for configuration errors.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use llg_core::cohomology::{
    betti_table, biinv36_matrices, ce_matrices, hat35_matrices, ilhc_matrices, ilhdc_row_matrices, CoefficientModule,
    ComplexKind, LocalizedComplex,
};
use llg_core::derive::{derive, Quantity};
use llg_core::expr::identity::IdentityConfig;
use llg_core::expr::EvalMode;
use llg_core::geometry::{invariant_frame, structure_constants, Splitting, Variant};
use llg_core::input::{from_builtin, load_form, load_subject, parse_rational, FormInput, Subject};
use llg_core::ops::{apply, render, Operator};
use llg_core::report::{BettiTable, Record, Report};
use llg_core::suites::{run_builtin, run_suite, Suite, SuiteConfig, SuiteError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "llg", version, about = "Horizontal complexes of local Lie groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Definition file with a [group], [splitting] or [algebra] table.
    #[arg(long, global = true, conflicts_with = "builtin")]
    pub input: Option<PathBuf>,
    /// abelian:N, heisenberg3, affine2, uppertriangular3 or sl2-constants.
    #[arg(long, global = true)]
    pub builtin: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Sample points per randomized identity.
    #[arg(long, global = true, default_value_t = 32)]
    pub trials: usize,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Relative tolerance in float mode.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Include per-record timings (not covered by the determinism contract).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Group and splitting axioms and the two-point integrability tensor.
    Check,
    /// Print a derived quantity.
    Derive {
        #[arg(long, value_parser = Quantity::NAMES)]
        what: String,
    },
    /// Betti numbers of a localized complex.
    Cohomology {
        /// ilhc, hat35, biinv36, ilhdc-row, or ce for the algebraic oracle.
        #[arg(long, default_value = "ilhc")]
        complex: String,
        /// trivial, adjoint, coadjoint, tensor:R,S or power:M.
        #[arg(long, default_value = "trivial")]
        coefficients: String,
        #[arg(long)]
        max_degree: Option<usize>,
        /// Number of point copies for ilhdc-row.
        #[arg(long, default_value_t = 2)]
        row: usize,
        /// Base point for localization, comma separated rationals.
        #[arg(long)]
        base: Option<String>,
        /// Include the differential matrices and basis labels.
        #[arg(long)]
        matrices: bool,
    },
    /// Apply an operator to a form file.
    Op {
        #[arg(long, value_parser = ["dhat", "dtilde", "delta", "linearize"])]
        apply: String,
        #[arg(long)]
        form: PathBuf,
    },
    /// Run verification suites.
    Verify {
        /// all, eq2 (identities), chain, double, invariance or cohomology.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Random forms per degree in the complex law checks.
        #[arg(long, default_value_t = 10)]
        forms_per_degree: usize,
        /// Invariant instances per degree in the preservation checks.
        #[arg(long, default_value_t = 5)]
        instances: usize,
    },
}

/// A configuration problem; maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

fn identity_config(g: &Global) -> Result<IdentityConfig, ConfigError> {
    if g.trials == 0 {
        return Err(ConfigError("--trials must be at least 1".into()));
    }
    let mut cfg = IdentityConfig::default().with_seed(g.seed).with_trials(g.trials);
    if g.mode == Mode::Float {
        cfg = cfg.with_mode(EvalMode::Float);
        if let Some(tol) = g.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(ConfigError("--tol must be a positive number".into()));
            }
            cfg.tol = tol;
        }
    } else if g.tol.is_some() {
        return Err(ConfigError("--tol only applies with --mode float".into()));
    }
    Ok(cfg)
}

fn load(g: &Global) -> Result<Option<Subject>, ConfigError> {
    let subject = match (&g.input, &g.builtin) {
        (Some(path), _) => {
            let text =
                fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            Some(load_subject(&text)?)
        }
        (None, Some(name)) => Some(from_builtin(name)?),
        (None, None) => None,
    };
    if let Some(s) = &subject {
        if s.is_transcendental() && g.mode != Mode::Float {
            return Err(ConfigError(format!(
                "{} uses exp, log, sin or cos, which exact rational evaluation cannot handle; rerun with --mode float",
                s.name()
            )));
        }
    }
    Ok(subject)
}

fn require(subject: Option<Subject>) -> Result<Subject, ConfigError> {
    subject.ok_or_else(|| ConfigError("give a definition with --input FILE or --builtin NAME".into()))
}

fn parse_base(text: &str, n: usize) -> Result<Vec<BigRational>, ConfigError> {
    let vals = text
        .split(',')
        .map(|t| parse_rational(t).ok_or_else(|| ConfigError(format!("'{}' is not a rational number", t.trim()))))
        .collect::<Result<Vec<_>, _>>()?;
    if vals.len() != n {
        return Err(ConfigError(format!("--base needs {n} coordinates")));
    }
    Ok(vals)
}

#[allow(clippy::too_many_arguments)]
fn cohomology_command(
    subject: &Subject,
    complex: &str,
    coefficients: &str,
    max_degree: Option<usize>,
    row: usize,
    base: Option<&str>,
    matrices: bool,
    report: &mut Report,
) -> Result<(), ConfigError> {
    let module: CoefficientModule = coefficients.parse().map_err(ConfigError)?;
    let n = subject.dim();
    let max_k = max_degree.unwrap_or(n);
    let constants = |g: &llg_core::geometry::GroupLaw| -> Result<_, ConfigError> {
        let s = Splitting::from_group(g, Variant::Tilde);
        Ok(structure_constants(&invariant_frame(&s, &g.identity)?, &g.identity)?)
    };
    let c: LocalizedComplex = match (complex, subject) {
        ("ce", Subject::Algebra { constants: c, .. }) => ce_matrices(c, module, max_k)?,
        ("ce", Subject::Group(g)) => ce_matrices(&constants(g)?, module, max_k)?,
        (_, Subject::Group(g)) => {
            let kind = ComplexKind::parse(complex).ok_or_else(|| {
                ConfigError(format!(
                    "unknown complex '{complex}' (ilhc, hat35, biinv36, ilhdc-row, ce)"
                ))
            })?;
            let base = match base {
                Some(b) => parse_base(b, n)?,
                None => g.identity.clone(),
            };
            match kind {
                ComplexKind::Ilhc => ilhc_matrices(g, module, max_k, &base)?,
                ComplexKind::Hat35 => hat35_matrices(g, module, max_k, &base)?,
                ComplexKind::Biinv36 => biinv36_matrices(g, module, max_k, &base)?,
                ComplexKind::IlhdcRow => ilhdc_row_matrices(g, row, max_k)?,
            }
        }
        _ => {
            return Err(ConfigError(format!(
                "complex '{complex}' needs a group law; structure constants support --complex ce"
            )))
        }
    };
    let dims = betti_table(&c);
    report.extend([Record::fact(
        "cohomology.complex",
        format!("{} {} {}", subject.name(), c.label, c.coefficients),
        dims.is_ok(),
        match &dims {
            Ok(_) => "consecutive differentials compose to zero".to_string(),
            Err(e) => e.to_string(),
        },
    )]);
    let Ok(dims) = dims else { return Ok(()) };
    let table = BettiTable::new(&c, dims);
    let mut out = serde_json::to_value(&table)?;
    let mut md = table.to_markdown();
    if matrices {
        out["bases"] = json!(c.bases);
        out["differentials"] = json!(c.d.iter().map(|m| m.to_json()).collect::<Vec<_>>());
        for (k, m) in c.d.iter().enumerate() {
            md.push_str(&format!("\nd{k}: {} x {}, rank {}\n", m.rows(), m.cols(), m.rank()));
        }
    }
    report.set_output(out, md);
    Ok(())
}

fn verify_command(
    subject: Option<&Subject>,
    suite: &str,
    cfg: &SuiteConfig,
    report: &mut Report,
) -> Result<(), ConfigError> {
    let suites = Suite::parse_list(suite).ok_or_else(|| {
        ConfigError(format!(
            "unknown suite '{suite}' (all, eq2, chain, double, invariance, cohomology)"
        ))
    })?;
    let expand = suite == "all";
    for s in suites {
        let records = match subject {
            None => run_builtin(s, cfg)?,
            Some(subj) => match run_suite(s, subj, cfg) {
                Ok(r) => r,
                Err(SuiteError::NeedsGroup { .. }) if expand => continue,
                Err(e) => return Err(e.into()),
            },
        };
        report.extend(records);
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Report, ConfigError> {
    let g = &cli.global;
    let cfg = identity_config(g)?;
    let subject = load(g)?;
    let label = subject
        .as_ref()
        .map_or_else(|| "builtins".to_string(), |s| s.name().to_string());
    let mut report = Report::new(command_name(&cli.command), label, &cfg);
    match &cli.command {
        Command::Check => {
            let s = require(subject)?;
            report.extend(llg_core::suites::check_subject(&s, &cfg));
        }
        Command::Derive { what } => {
            let s = require(subject)?;
            let q = Quantity::parse(what).ok_or_else(|| ConfigError(format!("unknown quantity '{what}'")))?;
            let d = derive(&s, q)?;
            report.set_output(d.json, d.markdown);
        }
        Command::Cohomology {
            complex,
            coefficients,
            max_degree,
            row,
            base,
            matrices,
        } => {
            let s = require(subject)?;
            if s.is_transcendental() {
                return Err(ConfigError("cohomology needs rational definitions".into()));
            }
            cohomology_command(
                &s,
                complex,
                coefficients,
                *max_degree,
                *row,
                base.as_deref(),
                *matrices,
                &mut report,
            )?;
        }
        Command::Op { apply: op, form } => {
            let s = require(subject)?;
            let text =
                fs::read_to_string(form).map_err(|e| ConfigError(format!("cannot read {}: {e}", form.display())))?;
            let input = load_form(&text, s.dim())?;
            if form_is_transcendental(&input) && g.mode != Mode::Float {
                return Err(ConfigError(
                    "the form uses exp, log, sin or cos; rerun with --mode float".into(),
                ));
            }
            let op = Operator::parse(op).ok_or_else(|| ConfigError(format!("unknown operator '{op}'")))?;
            let (json, md) = render(&apply(&s, op, &input)?);
            report.set_output(json, md);
        }
        Command::Verify {
            suite,
            forms_per_degree,
            instances,
        } => {
            if *forms_per_degree == 0 || *instances == 0 {
                return Err(ConfigError(
                    "--forms-per-degree and --instances must be at least 1".into(),
                ));
            }
            let scfg = SuiteConfig {
                identity: cfg.clone(),
                forms_per_degree: *forms_per_degree,
                instances: *instances,
            };
            verify_command(subject.as_ref(), suite, &scfg, &mut report)?;
        }
    }
    report.finish();
    Ok(report)
}

fn form_is_transcendental(f: &FormInput) -> bool {
    let comps = match f {
        FormInput::Nonlinear(w) => &w.comps,
        FormInput::OnT(f) => &f.comps,
    };
    comps.iter().any(|e| e.is_transcendental())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check => "check",
        Command::Derive { .. } => "derive",
        Command::Cohomology { .. } => "cohomology",
        Command::Op { .. } => "op",
        Command::Verify { .. } => "verify",
    }
}

/// Parses arguments, runs the command and writes the report. Returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(ConfigError(msg)) => {
            eprintln!("llg: {msg}");
            return EXIT_CONFIG;
        }
    };
    let text = match cli.global.format {
        Format::Json => report.to_json(cli.global.timings),
        Format::Markdown => report.to_markdown(cli.global.timings),
    };
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("llg: cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
        None => print!("{text}"),
    }
    if report.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
