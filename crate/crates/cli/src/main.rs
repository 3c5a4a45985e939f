use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fsing_core::field::{FieldCtx, Scalar};
use fsing_core::frobenius::{
    build_regularity_certificate_traced, fedder_fsplit, verify_regularity_certificate, CertificateCheck, FedderOutcome,
};
use fsing_core::input::{
    matroid_basis_polynomial, matroid_vars, parse_input, parse_matroid, verify_matroid, ParsedInput,
};
use fsing_core::invariants::{dfpt_at, fpt_crosscheck, global_invariants, DEFAULT_POINT_BUDGET};
use fsing_core::modification::{modification_pipeline, ModificationOptions};
use fsing_core::poly::{Point, Poly};
use fsing_core::report::{self, Status};
use fsing_core::structure::{disjoint_factorization_with, squarefree_violation, FactorOptions};
use fsing_core::suite::{theorem_suite, SuiteConfig};
use fsing_core::Error;
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(
    name = "fsing",
    version,
    about = "Frobenius singularity checks for square-free supported polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Emit JSON (the default).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Emit `path: value` lines instead of JSON.
    #[arg(long)]
    text: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock timings; the report is then no longer reproducible.
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the singularity checks on one polynomial of a `.poly` file.
    Check {
        file: PathBuf,
        #[arg(long)]
        poly: Option<String>,
        /// Comma-separated coordinates of the point for the dfpt check.
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 3)]
        e_max: u32,
        #[arg(long, default_value_t = 3)]
        s_max: usize,
        /// Comma-separated subset of factor,fsplit,fregular,dfpt,fpt,global, or `all`.
        #[arg(long, default_value = "all")]
        tests: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Print the variable-disjoint factorization.
    Factor {
        file: PathBuf,
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Sample the F-pure threshold oracle at the origin for e = 1..=E.
    Fpt {
        file: PathBuf,
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, default_value_t = 2)]
        e_max: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Run the checks on the basis generating polynomial of a matroid.
    Matroid {
        file: PathBuf,
        /// Check the basis exchange axiom before anything else.
        #[arg(long)]
        verify_matroid: bool,
        #[arg(long, default_value_t = 3)]
        e_max: u32,
        #[arg(long, default_value_t = 1)]
        s_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Build f = g·ℓ + h and check the transformed polynomial.
    Modify {
        file: PathBuf,
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        /// Coefficients a_1,...,a_n of ℓ = 1 + Σ a_i x_i.
        #[arg(long)]
        ell: String,
        #[arg(long, default_value_t = 3)]
        e_max: u32,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Run the randomized suite.
    Suite {
        #[arg(long, default_value = "2,3,5")]
        p: String,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        terms: usize,
        #[arg(long, default_value_t = 3)]
        factors: usize,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        e_max: u32,
        #[command(flatten)]
        output: Output,
    },
}

/// Failures that map to exit code 2.
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, InputError>;

const ALL_TESTS: [&str; 6] = ["factor", "fsplit", "fregular", "dfpt", "fpt", "global"];

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn select<'a>(input: &'a ParsedInput, name: Option<&'a str>) -> CliResult<(&'a str, &'a Poly)> {
    match name {
        None => Ok(input
            .polys
            .first()
            .map(|(n, f)| (n.as_str(), f))
            .expect("parser requires one poly")),
        Some(n) => input
            .get(n)
            .map(|f| (n, f))
            .ok_or_else(|| InputError(format!("no polynomial named `{n}`"))),
    }
}

fn scalars(text: &str, field: &FieldCtx) -> CliResult<Vec<Scalar>> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map(|v| field.from_int(v))
                .map_err(|_| InputError(format!("`{c}` is not an integer coordinate")))
        })
        .collect()
}

/// Rejects inputs outside the square-free supported regime.
fn require_theorem_input(f: &Poly) -> CliResult<()> {
    if f.is_zero() || f.is_constant() {
        return Err(InputError("polynomial is zero or constant".into()));
    }
    if let Some(m) = squarefree_violation(f) {
        return Err(InputError(format!(
            "not square-free supported (offending monomial {})",
            m.format(f.vars())
        )));
    }
    Ok(())
}

struct Timer {
    enabled: bool,
    entries: Map<String, Value>,
}

impl Timer {
    fn new(enabled: bool) -> Self {
        Timer {
            enabled,
            entries: Map::new(),
        }
    }

    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.entries.insert(label.into(), json!(start.elapsed().as_secs_f64()));
        }
        out
    }

    fn attach(self, results: &mut Map<String, Value>) {
        if self.enabled {
            results.insert("timings".into(), Value::Object(self.entries));
        }
    }
}

struct CheckParams<'a> {
    point: Option<&'a str>,
    e_max: u32,
    s_max: usize,
    tests: Vec<String>,
    seed: u64,
    timings: bool,
}

fn parse_tests(list: &str) -> CliResult<Vec<String>> {
    if list.trim() == "all" {
        return Ok(ALL_TESTS.iter().map(|s| s.to_string()).collect());
    }
    list.split(',')
        .map(|t| {
            let t = t.trim();
            if ALL_TESTS.contains(&t) {
                Ok(t.to_string())
            } else {
                Err(InputError(format!("unknown test `{t}`")))
            }
        })
        .collect()
}

/// The theorem-mode checks shared by `check` and `matroid`.
fn run_checks(f: &Poly, params: &CheckParams) -> CliResult<(Map<String, Value>, Status)> {
    require_theorem_input(f)?;
    if params.e_max == 0 {
        return Err(InputError("--e-max must be positive".into()));
    }
    let vars = f.vars().clone();
    let mut timer = Timer::new(params.timings);
    let mut results = Map::new();
    let mut status = Status::Pass;
    let wants = |t: &str| params.tests.iter().any(|x| x == t);

    let fact = timer.time("factor", || {
        disjoint_factorization_with(
            f,
            &FactorOptions {
                seed: params.seed,
                ..FactorOptions::default()
            },
        )
    })?;
    let ideal = fact.ideal.clone();
    if wants("factor") {
        results.insert("factor".into(), report::factorization(&fact));
    }

    if wants("fsplit") {
        let mut per_e = Vec::new();
        for e in 1..=params.e_max {
            let out = timer.time(&format!("fsplit_e{e}"), || fedder_fsplit(&ideal, e))?;
            if e == 1 && matches!(out, FedderOutcome::NotSplit { .. }) {
                status = Status::Counterexample;
            }
            per_e.push(report::fedder(&out, &vars));
        }
        results.insert("fsplit".into(), Value::Array(per_e));
    }

    if wants("fregular") {
        let value = match timer.time("fregular", || build_regularity_certificate_traced(&ideal, params.e_max)) {
            Ok((cert, notes)) => {
                let check = verify_regularity_certificate(&ideal, &cert);
                if !check.is_valid() {
                    status = Status::Counterexample;
                }
                json!({
                    "certificate": report::certificate(&cert, &vars),
                    "check": report::certificate_check(&check),
                    "notes": notes,
                })
            }
            Err(e @ Error::CertificateSearchExhausted { .. }) => {
                status = Status::Counterexample;
                let check = CertificateCheck::Invalid {
                    stage: None,
                    reason: e.to_string(),
                };
                json!({ "certificate": null, "check": report::certificate_check(&check), "notes": [] })
            }
            Err(e) => return Err(e.into()),
        };
        results.insert("fregular".into(), value);
    }

    if wants("dfpt") {
        let point = match params.point {
            Some(text) => {
                let coords = scalars(text, f.field())?;
                if coords.len() != f.nvars() {
                    return Err(InputError(format!("--point needs {} coordinates", f.nvars())));
                }
                Point::new(coords)
            }
            None => Point::origin(f.nvars()),
        };
        let r = timer.time("dfpt", || dfpt_at(&ideal, &point))?;
        if r.dfpt != r.mult as i64 - r.t as i64 || r.dfpt < 0 {
            status = Status::Counterexample;
        }
        results.insert("dfpt".into(), report::invariants(&r, f.field()));
    }

    if wants("fpt") {
        let e_list: Vec<u32> = (1..=params.e_max.min(2)).collect();
        match timer.time("fpt", || fpt_crosscheck(&ideal, &e_list)) {
            Ok(rows) => {
                if rows.iter().any(|(_, d)| *d != Some(0.into())) {
                    status = Status::Counterexample;
                }
                results.insert("fpt".into(), report::crosscheck(&rows));
            }
            Err(Error::PointNotOnVariety) => {
                results.insert("fpt".into(), json!({ "skipped": "origin is not on the variety" }));
            }
            Err(e) => return Err(e.into()),
        }
    }

    if wants("global") {
        let r = timer.time("global", || {
            global_invariants(&ideal, params.s_max, DEFAULT_POINT_BUDGET)
        })?;
        let field = FieldCtx::new(f.field().characteristic() as u64, r.point_field_degree)?;
        results.insert("global".into(), report::invariants(&r, &field));
    }

    timer.attach(&mut results);
    Ok((results, status))
}

fn check(file: &Path, name: Option<&str>, params: &CheckParams) -> CliResult<(Value, Status)> {
    let input = parse_input(&read(file)?)?;
    let (name, f) = select(&input, name)?;
    let (results, status) = run_checks(f, params)?;
    let echo = json!({ "file": file.display().to_string(), "poly": name, "expr": report::poly(f) });
    Ok((
        report::envelope(&input.field, &input.vars, echo, Value::Object(results), status),
        status,
    ))
}

fn factor(file: &Path, name: Option<&str>, seed: u64, timings: bool) -> CliResult<(Value, Status)> {
    let input = parse_input(&read(file)?)?;
    let (name, f) = select(&input, name)?;
    require_theorem_input(f)?;
    let mut timer = Timer::new(timings);
    let fact = timer.time("factor", || {
        disjoint_factorization_with(
            f,
            &FactorOptions {
                seed,
                ..FactorOptions::default()
            },
        )
    })?;
    let mut results = Map::new();
    results.insert("factor".into(), report::factorization(&fact));
    timer.attach(&mut results);
    let echo = json!({ "file": file.display().to_string(), "poly": name, "expr": report::poly(f) });
    Ok((
        report::envelope(&input.field, &input.vars, echo, Value::Object(results), Status::Pass),
        Status::Pass,
    ))
}

fn fpt(file: &Path, name: Option<&str>, e_max: u32, timings: bool) -> CliResult<(Value, Status)> {
    let input = parse_input(&read(file)?)?;
    let (name, f) = select(&input, name)?;
    require_theorem_input(f)?;
    if e_max == 0 {
        return Err(InputError("--e-max must be positive".into()));
    }
    let mut timer = Timer::new(timings);
    let ideal = disjoint_factorization_with(f, &FactorOptions::default())?.ideal;
    let e_list: Vec<u32> = (1..=e_max).collect();
    let rows = timer.time("fpt", || fpt_crosscheck(&ideal, &e_list))?;
    let status = if rows.iter().all(|(_, d)| *d == Some(0.into())) {
        Status::Pass
    } else {
        Status::Counterexample
    };
    let mut results = Map::new();
    results.insert("fpt".into(), report::crosscheck(&rows));
    timer.attach(&mut results);
    let echo = json!({ "file": file.display().to_string(), "poly": name, "expr": report::poly(f), "e_max": e_max });
    Ok((
        report::envelope(&input.field, &input.vars, echo, Value::Object(results), status),
        status,
    ))
}

fn matroid(file: &Path, verify: bool, params: &CheckParams) -> CliResult<(Value, Status)> {
    let m = parse_matroid(&read(file)?)?;
    if verify && !verify_matroid(&m) {
        return Err(InputError("bases violate the exchange axiom".into()));
    }
    let field = Arc::new(FieldCtx::prime(m.p.unwrap_or(2)).map_err(|e| Error::BadFieldSpec(e.to_string()))?);
    let vars = matroid_vars(m.n)?;
    let f = matroid_basis_polynomial(&m, field.clone(), vars.clone())?;
    let (mut results, status) = run_checks(&f, params)?;
    results.insert("basis_polynomial".into(), report::poly(&f));
    let echo = json!({
        "file": file.display().to_string(),
        "n": m.n,
        "bases": m.bases,
        "exchange_verified": verify,
    });
    Ok((
        report::envelope(&field, &vars, echo, Value::Object(results), status),
        status,
    ))
}

fn modify(
    file: &Path,
    g: &str,
    h: &str,
    ell: &str,
    opts: &ModificationOptions,
    timings: bool,
) -> CliResult<(Value, Status)> {
    let input = parse_input(&read(file)?)?;
    let (_, gp) = select(&input, Some(g))?;
    let (_, hp) = select(&input, Some(h))?;
    let a = scalars(ell, &input.field)?;
    let mut timer = Timer::new(timings);
    let r = timer.time("modify", || modification_pipeline(gp, hp, &a, opts))?;
    let status = if r.passed() {
        Status::Pass
    } else {
        Status::Counterexample
    };
    let mut results = Map::new();
    results.insert("modify".into(), report::modification(&r));
    timer.attach(&mut results);
    let echo = json!({
        "file": file.display().to_string(),
        "g": report::poly(gp),
        "h": report::poly(hp),
        "ell": a.iter().map(|c| input.field.format_scalar(c)).collect::<Vec<_>>(),
    });
    Ok((
        report::envelope(&input.field, &input.vars, echo, Value::Object(results), status),
        status,
    ))
}

fn suite(config: &SuiteConfig, timings: bool) -> CliResult<(Value, Status)> {
    let mut timer = Timer::new(timings);
    let r = timer.time("suite", || theorem_suite(config))?;
    let status = report::suite_status(&r);
    let mut value = report::suite(&r, config);
    if let Some(Value::Object(results)) = value.get_mut("results") {
        timer.attach(results);
    }
    Ok((value, status))
}

fn emit(value: &Value, output: &Output) -> CliResult<()> {
    let text = if output.text {
        report::to_text(value)
    } else {
        let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
        s.push('\n');
        s
    };
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<Status> {
    let (value, status, output) = match cli.command {
        Command::Check {
            file,
            poly,
            point,
            e_max,
            s_max,
            tests,
            seed,
            output,
        } => {
            let params = CheckParams {
                point: point.as_deref(),
                e_max,
                s_max,
                tests: parse_tests(&tests)?,
                seed,
                timings: output.timings,
            };
            let (v, s) = check(&file, poly.as_deref(), &params)?;
            (v, s, output)
        }
        Command::Factor {
            file,
            poly,
            seed,
            output,
        } => {
            let (v, s) = factor(&file, poly.as_deref(), seed, output.timings)?;
            (v, s, output)
        }
        Command::Fpt {
            file,
            poly,
            e_max,
            output,
        } => {
            let (v, s) = fpt(&file, poly.as_deref(), e_max, output.timings)?;
            (v, s, output)
        }
        Command::Matroid {
            file,
            verify_matroid,
            e_max,
            s_max,
            output,
        } => {
            let params = CheckParams {
                point: None,
                e_max,
                s_max,
                tests: parse_tests("all")?,
                seed: 0,
                timings: output.timings,
            };
            let (v, s) = matroid(&file, verify_matroid, &params)?;
            (v, s, output)
        }
        Command::Modify {
            file,
            g,
            h,
            ell,
            e_max,
            points,
            output,
        } => {
            let opts = ModificationOptions {
                e_max,
                points,
                ..ModificationOptions::default()
            };
            let (v, s) = modify(&file, &g, &h, &ell, &opts, output.timings)?;
            (v, s, output)
        }
        Command::Suite {
            p,
            n,
            terms,
            factors,
            count,
            seed,
            e_max,
            output,
        } => {
            let primes = p
                .split(',')
                .map(|x| {
                    let v: u64 = x
                        .trim()
                        .parse()
                        .map_err(|_| InputError(format!("`{x}` is not a prime")))?;
                    FieldCtx::prime(v).map_err(InputError::from)?;
                    Ok(v)
                })
                .collect::<CliResult<Vec<_>>>()?;
            let config = SuiteConfig {
                primes,
                n,
                max_terms: terms,
                max_factors: factors,
                count,
                seed,
                e_max,
                ..SuiteConfig::default()
            };
            let (v, s) = suite(&config, output.timings)?;
            (v, s, output)
        }
    };
    emit(&value, &output)?;
    Ok(status)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(Status::Error.exit_code() as u8)
        }
    }
}
