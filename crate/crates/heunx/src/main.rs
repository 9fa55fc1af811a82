//! Command-line interface over the exact engine: series expansion of local
//! solutions, enumeration of their fractional-linear orbits, catalog
//! verification, covering search with nonexistence certificates, and the
//! classification of parametric pull-back transformations.
//!
//! Exit codes: 0 — success / all checks pass; 1 — a verification failure;
//! 2 — input or parse error; 3 — unsupported degree or field.

use clap::{Args, Parser, Subcommand, ValueEnum};
use heun_core::catalog::{builtin_catalog, find_record, serialize_catalog, TransformationRecord};
use heun_core::covering::{
    classify_three_parameter, classify_two_parameter, solve_covering, BranchingPattern,
    CandidateRow, RowFinding, SolveError, SolveOutcome,
};
use heun_core::exec::ExecMode;
use heun_core::heun::HeunParams;
use heun_core::hpg::HypergeometricParams;
use heun_core::orbit::{orbit_report, verify_record, EquationParams};
use heun_core::pullback::{
    verify_identity, CatalogIdentity, FieldChoice, VerifyError, VerifyOptions,
};
use heun_core::sample;
use heun_core::scalar::Rational;
use heun_core::verify::{verify_all, RecordOutcome};
use serde_json::json;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "heunx",
    version,
    about = "Exact-arithmetic toolkit for hypergeometric and Heun pull-back transformations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the power-series jet of the normalized local solution at 0
    Expand(ExpandArgs),
    /// Verify one catalog identity by exact series comparison
    Verify(VerifyOneArgs),
    /// Verify every catalog identity and report per-record results
    VerifyAll(VerifyAllArgs),
    /// Enumerate the fractional-linear orbit of local solutions (24 or 192)
    Orbit(OrbitArgs),
    /// Find all coverings with a prescribed branching pattern, or certify
    /// that none exists
    SearchCovering(SearchArgs),
    /// Re-derive the classification of 2- or 3-parameter transformations
    Classify(ClassifyArgs),
    /// List the identity catalog or dump a single record
    Catalog(CatalogArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Hpg,
    Heun,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldArg {
    Q,
    QOmega,
    Auto,
}

impl FieldArg {
    fn choice(self) -> FieldChoice {
        match self {
            FieldArg::Q => FieldChoice::Rational,
            FieldArg::QOmega => FieldChoice::OmegaExtension,
            FieldArg::Auto => FieldChoice::Auto,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Sequential,
    Parallel,
}

impl ModeArg {
    fn mode(self) -> ExecMode {
        match self {
            ModeArg::Sequential => ExecMode::Sequential,
            ModeArg::Parallel => ExecMode::Parallel,
        }
    }
}

/// Rational parameter slots; which ones are required depends on the family.
#[derive(Args)]
struct ParamArgs {
    /// Movable singular location t (Heun only; t outside {0, 1})
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Accessory parameter q (Heun only)
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Exponent parameter a
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Exponent parameter b
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Lower parameter c
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Exponent parameter d (Heun only)
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
}

impl ParamArgs {
    fn slot(&self, name: &str) -> Result<Rational, String> {
        let raw = match name {
            "t" => &self.t,
            "q" => &self.q,
            "a" => &self.a,
            "b" => &self.b,
            "c" => &self.c,
            "d" => &self.d,
            _ => unreachable!("fixed slot list"),
        };
        let raw = raw
            .as_ref()
            .ok_or_else(|| format!("missing required parameter --{name}"))?;
        raw.parse::<Rational>()
            .map_err(|e| format!("parameter --{name}: {e}"))
    }

    fn equation(&self, family: Family) -> Result<EquationParams<Rational>, String> {
        match family {
            Family::Hpg => Ok(EquationParams::Gauss(HypergeometricParams::new(
                self.slot("a")?,
                self.slot("b")?,
                self.slot("c")?,
            ))),
            Family::Heun => {
                let params = HeunParams::new(
                    self.slot("t")?,
                    self.slot("q")?,
                    self.slot("a")?,
                    self.slot("b")?,
                    self.slot("c")?,
                    self.slot("d")?,
                );
                if !params.is_nondegenerate() {
                    return Err("t in {0, 1} degenerates the Heun equation".to_string());
                }
                Ok(EquationParams::Heun(params))
            }
        }
    }
}

#[derive(Args)]
struct ExpandArgs {
    /// Equation family
    #[arg(long, value_enum)]
    equation: Family,
    #[command(flatten)]
    params: ParamArgs,
    /// Expand through the coefficient of x^order
    #[arg(long, default_value_t = 16)]
    order: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct VerifyFlags {
    /// Compare series through the coefficient of x^order
    #[arg(long, default_value_t = 16)]
    order: usize,
    /// Number of random parameter tuples per identity
    #[arg(long, default_value_t = 5)]
    samples: usize,
    /// Seed for the deterministic sample stream
    #[arg(long, default_value_t = sample::DEFAULT_SEED)]
    seed: u64,
    /// Height bound for sampled rationals (max |numerator|, denominator)
    #[arg(long, default_value_t = sample::DEFAULT_HEIGHT)]
    height: u64,
    /// Coefficient field to evaluate in
    #[arg(long, value_enum, default_value_t = FieldArg::Auto)]
    field: FieldArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl VerifyFlags {
    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            order: self.order,
            samples: self.samples,
            seed: self.seed,
            height: self.height,
            field: self.field.choice(),
        }
    }
}

#[derive(Args)]
struct VerifyOneArgs {
    /// Record id, as shown by `catalog --list`
    record_id: String,
    #[command(flatten)]
    flags: VerifyFlags,
}

#[derive(Args)]
struct VerifyAllArgs {
    #[command(flatten)]
    flags: VerifyFlags,
    /// Execution strategy for the independent per-record checks
    #[arg(long, value_enum, default_value_t = ModeArg::Parallel)]
    mode: ModeArg,
}

#[derive(Args)]
struct OrbitArgs {
    /// Equation family
    #[arg(long, value_enum)]
    equation: Family,
    #[command(flatten)]
    params: ParamArgs,
    /// Also check every record's residual through this series order
    /// (0 skips the check)
    #[arg(long, default_value_t = 0)]
    order: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SearchArgs {
    /// Branching pattern, three `+`-separated partitions joined by `=`,
    /// for the fibers above 0, 1, and infinity — e.g. "2+1=2+1=3"
    #[arg(long)]
    pattern: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Number of free parameters in the transformation family (2 or 3)
    #[arg(long)]
    params: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct CatalogArgs {
    /// List all record ids
    #[arg(long)]
    list: bool,
    /// Print one record in the catalog file format
    #[arg(long)]
    show: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Expand(args) => run_expand(args),
        Command::Verify(args) => run_verify_one(args),
        Command::VerifyAll(args) => run_verify_all(args),
        Command::Orbit(args) => run_orbit(args),
        Command::SearchCovering(args) => run_search(args),
        Command::Classify(args) => run_classify(args),
        Command::Catalog(args) => run_catalog(args),
    };
    ExitCode::from(code)
}

fn input_error(message: &str) -> u8 {
    eprintln!("error: {message}");
    EXIT_INPUT
}

fn run_expand(args: ExpandArgs) -> u8 {
    let equation = match args.params.equation(args.equation) {
        Ok(eq) => eq,
        Err(e) => return input_error(&e),
    };
    let series = match equation.series(args.order) {
        Ok(s) => s,
        Err(e) => return input_error(&format!("series recurrence failed: {e}")),
    };
    match args.format {
        Format::Text => {
            println!("{equation}");
            for i in 0..=args.order {
                println!("x^{i}: {}", series.coeff(i));
            }
        }
        Format::Structured => {
            let coeffs: Vec<String> =
                (0..=args.order).map(|i| series.coeff(i).to_string()).collect();
            let doc = json!({
                "equation": equation.to_string(),
                "order": args.order,
                "coefficients": coeffs,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("valid json"));
        }
    }
    EXIT_OK
}

fn verify_error_code(e: &VerifyError) -> u8 {
    match e {
        VerifyError::NotVerifiable(_) => EXIT_INPUT,
        VerifyError::SamplingExhausted { .. } => EXIT_VERIFY_FAILED,
        VerifyError::FieldTooSmall { .. } => EXIT_UNSUPPORTED,
    }
}

fn run_verify_one(args: VerifyOneArgs) -> u8 {
    let records = builtin_catalog();
    let Some(rec) = find_record(&records, &args.record_id) else {
        return input_error(&format!("no catalog record named `{}`", args.record_id));
    };
    let opts = args.flags.options();
    match verify_identity(&CatalogIdentity::Stored(rec.clone()), &opts) {
        Ok(report) => {
            let outcome = if report.passed {
                RecordOutcome::Verified(report.clone())
            } else {
                RecordOutcome::Mismatch(report.clone())
            };
            match args.flags.format {
                Format::Text => println!("{}: {}", rec.id, outcome.describe()),
                Format::Structured => {
                    let doc = json!({
                        "id": rec.id,
                        "passed": report.passed,
                        "field": report.field,
                        "order": report.order,
                        "samples": report.samples_run,
                        "resamples": report.resamples,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("valid json"));
                }
            }
            if report.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            verify_error_code(&e)
        }
    }
}

fn run_verify_all(args: VerifyAllArgs) -> u8 {
    let records = builtin_catalog();
    let opts = args.flags.options();
    let report = verify_all(&records, &opts, args.mode.mode());
    match args.flags.format {
        Format::Text => {
            for line in report.lines() {
                println!("{line}");
            }
            println!(
                "verified {} of {} records; {}",
                report.verified_count(),
                report.outcomes.len(),
                if report.all_passed() {
                    "all identities hold"
                } else {
                    "FAILURES PRESENT"
                }
            );
        }
        Format::Structured => {
            let outcomes: Vec<serde_json::Value> = report
                .outcomes
                .iter()
                .map(|(id, o)| {
                    let status = match o {
                        RecordOutcome::Verified(_) => "pass",
                        RecordOutcome::Mismatch(_) => "fail",
                        RecordOutcome::SignatureOnly => "skip",
                        RecordOutcome::Failed(_) => "error",
                    };
                    json!({ "id": id, "status": status, "detail": o.describe() })
                })
                .collect();
            let doc = json!({
                "outcomes": outcomes,
                "verified": report.verified_count(),
                "all_passed": report.all_passed(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("valid json"));
        }
    }
    if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

fn run_orbit(args: OrbitArgs) -> u8 {
    let equation = match args.params.equation(args.equation) {
        Ok(eq) => eq,
        Err(e) => return input_error(&e),
    };
    let report = orbit_report(&equation);
    let mut residual_failures = 0usize;
    let mut residual_lines: Vec<String> = Vec::new();
    if args.order > 0 {
        for (i, rec) in report.records.iter().enumerate() {
            match verify_record(&equation, rec, args.order) {
                Ok(check) if check.ok => {}
                Ok(_) => {
                    residual_failures += 1;
                    residual_lines.push(format!("record {i}: residual does not vanish"));
                }
                Err(e) => {
                    residual_failures += 1;
                    residual_lines.push(format!("record {i}: {e}"));
                }
            }
        }
    }
    match args.format {
        Format::Text => {
            println!("{equation}");
            for (i, rec) in report.records.iter().enumerate() {
                println!("{i}: {rec}");
            }
            println!(
                "{} records (generic orbit size {})",
                report.records.len(),
                report.expected
            );
            for line in &residual_lines {
                println!("{line}");
            }
            if args.order > 0 && residual_failures == 0 {
                println!(
                    "all residuals vanish through order {}",
                    args.order.max(4)
                );
            }
        }
        Format::Structured => {
            let records: Vec<String> =
                report.records.iter().map(|r| r.to_string()).collect();
            let doc = json!({
                "equation": equation.to_string(),
                "count": report.records.len(),
                "expected": report.expected,
                "records": records,
                "residual_failures": residual_failures,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("valid json"));
        }
    }
    if report.collapsed() || residual_failures > 0 {
        EXIT_VERIFY_FAILED
    } else {
        EXIT_OK
    }
}

fn solve_error_code(e: &SolveError) -> u8 {
    match e {
        SolveError::UnsupportedDegree(_) => EXIT_UNSUPPORTED,
        SolveError::NotBelyi => EXIT_INPUT,
        SolveError::Inconclusive(_) => EXIT_UNSUPPORTED,
    }
}

fn run_search(args: SearchArgs) -> u8 {
    let pattern = match BranchingPattern::parse(&args.pattern) {
        Ok(p) => p,
        Err(e) => return input_error(&format!("bad pattern `{}`: {e}", args.pattern)),
    };
    match solve_covering(&pattern) {
        Ok(SolveOutcome::Found {
            solutions,
            search_closed,
        }) => {
            match args.format {
                Format::Text => {
                    for (i, sol) in solutions.iter().enumerate() {
                        println!(
                            "covering {}: phi = {} [gauge {}]",
                            i + 1,
                            sol.phi,
                            sol.normalization
                        );
                    }
                    println!(
                        "{} covering(s) of degree {}; search {}",
                        solutions.len(),
                        pattern.degree(),
                        if search_closed {
                            "closed (list is complete up to gauge)"
                        } else {
                            "not closed"
                        }
                    );
                }
                Format::Structured => {
                    let sols: Vec<serde_json::Value> = solutions
                        .iter()
                        .map(|s| {
                            json!({
                                "phi": s.phi.to_string(),
                                "gauge": s.normalization.to_string(),
                            })
                        })
                        .collect();
                    let doc = json!({
                        "pattern": pattern.to_string(),
                        "outcome": "found",
                        "solutions": sols,
                        "search_closed": search_closed,
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("valid json")
                    );
                }
            }
            EXIT_OK
        }
        Ok(SolveOutcome::Empty { witness }) => {
            match args.format {
                Format::Text => {
                    println!("NO COVERING with branching pattern {pattern}");
                    println!(
                        "certificate [gauge {}]: {}",
                        witness.normalization, witness.certificate
                    );
                }
                Format::Structured => {
                    let doc = json!({
                        "pattern": pattern.to_string(),
                        "outcome": "none",
                        "gauge": witness.normalization.to_string(),
                        "certificate": witness.certificate.to_string(),
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("valid json")
                    );
                }
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            solve_error_code(&e)
        }
    }
}

fn candidate_json(row: &CandidateRow) -> serde_json::Value {
    json!({
        "pattern": row.pattern.to_string(),
        "degree": row.pattern.degree(),
        "branch_order": row.fixed_branch_order,
        "free_parameters": row.free_parameters,
        "gauss_signature": row
            .gauss_signature
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>(),
        "upstairs_signature": row
            .upstairs_signature
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>(),
    })
}

fn run_classify(args: ClassifyArgs) -> u8 {
    match args.params {
        3 => {
            let rows = classify_three_parameter();
            match args.format {
                Format::Text => {
                    println!(
                        "3-parameter pull-backs exist only in degree 1 \
                         (fractional-linear) and degree 2 (quadratic):"
                    );
                    for row in &rows {
                        println!("{row}");
                    }
                }
                Format::Structured => {
                    let doc = json!({
                        "free_parameters": 3,
                        "rows": rows.iter().map(candidate_json).collect::<Vec<_>>(),
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("valid json")
                    );
                }
            }
            EXIT_OK
        }
        2 => {
            let rows = match classify_two_parameter() {
                Ok(rows) => rows,
                Err(e) => {
                    eprintln!("error: {e}");
                    return solve_error_code(&e);
                }
            };
            match args.format {
                Format::Text => {
                    for row in &rows {
                        println!("{}", row.candidate);
                        match &row.finding {
                            RowFinding::Nonexistent { witness } => {
                                println!(
                                    "  NO COVERING — certificate [gauge {}]: {}",
                                    witness.normalization, witness.certificate
                                );
                            }
                            RowFinding::Unique {
                                solution,
                                composition,
                                solutions_found,
                                search_closed,
                                all_equivalent,
                            } => {
                                println!(
                                    "  covering: phi = {} [gauge {}]",
                                    solution.phi, solution.normalization
                                );
                                println!(
                                    "  composition: {composition}; {} solution(s), \
                                     search {}, {}",
                                    solutions_found,
                                    if *search_closed { "closed" } else { "open" },
                                    if *all_equivalent {
                                        "unique up to fractional-linear gauge"
                                    } else {
                                        "NOT all equivalent"
                                    }
                                );
                            }
                        }
                    }
                }
                Format::Structured => {
                    let rows_json: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|row| {
                            let finding = match &row.finding {
                                RowFinding::Nonexistent { witness } => json!({
                                    "existence": "none",
                                    "gauge": witness.normalization.to_string(),
                                    "certificate": witness.certificate.to_string(),
                                }),
                                RowFinding::Unique {
                                    solution,
                                    composition,
                                    solutions_found,
                                    search_closed,
                                    all_equivalent,
                                } => json!({
                                    "existence": "unique",
                                    "phi": solution.phi.to_string(),
                                    "gauge": solution.normalization.to_string(),
                                    "composition": composition.to_string(),
                                    "solutions_found": solutions_found,
                                    "search_closed": search_closed,
                                    "all_equivalent": all_equivalent,
                                }),
                            };
                            let mut value = candidate_json(&row.candidate);
                            value["finding"] = finding;
                            value
                        })
                        .collect();
                    let doc = json!({ "free_parameters": 2, "rows": rows_json });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("valid json")
                    );
                }
            }
            EXIT_OK
        }
        other => input_error(&format!(
            "--params must be 2 or 3 (got {other}); larger parameter counts \
             admit no pull-back family"
        )),
    }
}

fn record_summary(rec: &TransformationRecord) -> String {
    format!(
        "{} ({}, field {}, degree {})",
        rec.id,
        rec.kind.as_str(),
        rec.field.as_str(),
        rec.degree
    )
}

fn run_catalog(args: CatalogArgs) -> u8 {
    let records = builtin_catalog();
    match (&args.list, &args.show) {
        (true, None) => {
            match args.format {
                Format::Text => {
                    for rec in &records {
                        println!("{}", record_summary(rec));
                    }
                    println!("{} records", records.len());
                }
                Format::Structured => {
                    let rows: Vec<serde_json::Value> = records
                        .iter()
                        .map(|rec| {
                            json!({
                                "id": rec.id,
                                "kind": rec.kind.as_str(),
                                "field": rec.field.as_str(),
                                "degree": rec.degree,
                                "verifiable": rec.is_verifiable(),
                            })
                        })
                        .collect();
                    let doc = json!({ "records": rows });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("valid json")
                    );
                }
            }
            EXIT_OK
        }
        (false, Some(id)) => {
            let Some(rec) = find_record(&records, id) else {
                return input_error(&format!("no catalog record named `{id}`"));
            };
            match args.format {
                Format::Text => print!("{}", serialize_catalog(&[rec.clone()])),
                Format::Structured => {
                    let doc = json!({
                        "id": rec.id,
                        "kind": rec.kind.as_str(),
                        "field": rec.field.as_str(),
                        "degree": rec.degree,
                        "text": serialize_catalog(&[rec.clone()]),
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("valid json")
                    );
                }
            }
            EXIT_OK
        }
        _ => input_error("pass exactly one of --list or --show <id>"),
    }
}
