//! `ccrm` command-line tool: solve catalog or JSON-specified feasibility
//! problems, write traces and rate reports, print curvature diagnostics and
//! reproduce the two result tables.
//!
//! Exit codes: 0 on success (feasible termination for `solve`), 2 when `solve`
//! stops on the iteration cap or stagnates, 1 on any input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ccrm::catalog::{by_name, CatalogEntry, ExpectedRates};
use ccrm::diagnostics::{
    curvature, estimate_omega, CurvatureValue, OmegaEstimate, RateClass, OMEGA_RADII, OMEGA_SAMPLES,
};
use ccrm::extended::Precision;
use ccrm::io::{write_file_atomic, write_trace_csv, ProblemFileV1, RunReport, TraceJson};
use ccrm::solvers::{run, FeasibilityProblem, KnownConstants, Method, SolverConfig, Termination};
use ccrm::tables::{table1, table2, Table1, Table2};
use ccrm::{Error, Result, Vector};
use clap::{Parser, Subcommand};
use serde::Serialize;

const OMEGA_SEED: u64 = 2024;

#[derive(Parser)]
#[command(
    name = "ccrm",
    version,
    about = "Centralized circumcentered-reflection solvers for two-set convex feasibility"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solver and write its trace and rate report.
    Solve {
        /// Catalog name (`name` or `name:key=val,...`) or a problem JSON file.
        #[arg(long)]
        problem: String,
        #[arg(long, default_value = "ccrm")]
        method: Method,
        /// Comma-separated starting point, or `default`.
        #[arg(long, default_value = "default", allow_hyphen_values = true)]
        z0: String,
        /// Feasibility tolerance on max(dist(z, X), dist(z, Y)).
        #[arg(long, default_value_t = 1e-12, allow_hyphen_values = true)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Trace file; `.csv` or `.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rate report JSON file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Distances and ratios of cCRM on the disc problem.
    Table1 {
        #[arg(long, default_value = "extended")]
        precision: Precision,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Rate classification grid for the power-epigraph family.
    Table2 {
        #[arg(long, default_value = "extended")]
        precision: Precision,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Curvatures, error-bound estimate and predicted quadratic constants at a point.
    Diagnose {
        #[arg(long)]
        problem: String,
        /// Comma-separated point; defaults to the problem's reference limit.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which here means "not feasible"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Solve {
            problem,
            method,
            z0,
            tol,
            max_iter,
            out,
            report,
        } => cmd_solve(
            &problem,
            method,
            &z0,
            tol,
            max_iter,
            out.as_deref(),
            report.as_deref(),
        ),
        Command::Table1 { precision, csv } => cmd_table1(precision, csv.as_deref()),
        Command::Table2 {
            precision,
            threads,
            csv,
        } => cmd_table2(precision, threads, csv.as_deref()),
        Command::Diagnose { problem, point } => cmd_diagnose(&problem, point.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

struct Loaded {
    name: String,
    problem: FeasibilityProblem,
    z0: Option<Vector>,
    expected: ExpectedRates,
    warnings: Vec<String>,
}

/// A problem argument naming an existing file or ending in `.json` is read as
/// a problem file; anything else goes to the catalog.
fn load_problem(arg: &str) -> Result<Loaded> {
    let path = Path::new(arg);
    if arg.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {arg}: {e}")))?;
        let (problem, z0) = ProblemFileV1::parse(&text)?.build()?;
        let name = path
            .file_stem()
            .map_or_else(|| arg.to_string(), |s| s.to_string_lossy().into_owned());
        return Ok(Loaded {
            name,
            problem,
            z0,
            expected: ExpectedRates::default(),
            warnings: Vec::new(),
        });
    }
    let CatalogEntry {
        name,
        problem,
        suggested_z0,
        expected,
        warnings,
    } = by_name(arg)?;
    let name = if arg.contains(':') {
        arg.to_string()
    } else {
        name
    };
    Ok(Loaded {
        name,
        problem,
        z0: Some(suggested_z0),
        expected,
        warnings,
    })
}

fn parse_point(text: &str, dim: usize, what: &str) -> Result<Vector> {
    let values = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Input(format!("{what} entry '{s}' is not a finite number")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != dim {
        return Err(Error::Input(format!(
            "{what} has {} entries but the problem lives in R^{dim}",
            values.len()
        )));
    }
    Ok(Vector::from_vec(values))
}

fn output_kind(path: &Path) -> Result<&'static str> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok("csv"),
        Some("json") => Ok("json"),
        _ => Err(Error::Input(format!(
            "{} must end in .csv or .json",
            path.display()
        ))),
    }
}

fn cmd_solve(
    problem_arg: &str,
    method: Method,
    z0_arg: &str,
    tol: f64,
    max_iter: usize,
    out: Option<&Path>,
    report_path: Option<&Path>,
) -> Result<ExitCode> {
    let out_kind = out.map(output_kind).transpose()?;
    let loaded = load_problem(problem_arg)?;
    let z0 = if z0_arg == "default" {
        loaded
            .z0
            .clone()
            .ok_or_else(|| Error::Input("the problem file has no z0; pass --z0".into()))?
    } else {
        parse_point(z0_arg, loaded.problem.dim(), "z0")?
    };
    let cfg = SolverConfig {
        method,
        tol_feas: tol,
        max_iter,
        ..SolverConfig::default()
    };
    let trace = run(&loaded.problem, &cfg, &z0)?;
    let mut report = RunReport::build(&loaded.name, &loaded.problem, &loaded.expected, &trace);
    report.warnings.extend(loaded.warnings.iter().cloned());

    // Everything is serialized before the first file is touched.
    let trace_bytes = match out_kind {
        Some("csv") => {
            let mut buf = Vec::new();
            write_trace_csv(&trace, &mut buf)?;
            Some(buf)
        }
        Some(_) => Some(to_json(&TraceJson::from_trace(&trace)).into_bytes()),
        None => None,
    };
    let report_json = report.to_json();
    if let (Some(path), Some(bytes)) = (out, trace_bytes) {
        write_file_atomic(path, &bytes)?;
    }
    if let Some(path) = report_path {
        write_file_atomic(path, report_json.as_bytes())?;
    }

    println!(
        "{} {}: {} after {} iterations, max residual {:.3e}",
        report.problem,
        method,
        trace.termination.as_str(),
        report.iterations,
        trace.max_residuals().last().copied().unwrap_or(f64::NAN),
    );
    match &report.classification {
        Some(c) => println!("rate: {c}"),
        None => println!(
            "rate: not classified ({})",
            report.classification_note.as_deref().unwrap_or("no data")
        ),
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(match trace.termination {
        Termination::Feasible => ExitCode::SUCCESS,
        Termination::MaxIter | Termination::Stagnation => ExitCode::from(2),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data always serializes")
}

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn format_table1(t: &Table1) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>2}  {:>10}  {:>10}  {:>12}  {:>12}",
        "k", "|z^k-z*|", "|z^k+1-z*|", "linear", "quadratic"
    );
    for r in &t.rows {
        let mark = if r.precision == Precision::Extended {
            " *"
        } else {
            ""
        };
        let _ = writeln!(
            s,
            "{:>2}  {:>10}  {:>10}  {:>12}  {:>12}{mark}",
            r.k,
            sci(r.dist),
            sci(r.next_dist),
            sci(r.linear_ratio),
            sci(r.quadratic_ratio)
        );
    }
    if t.omitted_last_row {
        let _ = writeln!(
            s,
            "k = 4 omitted: |z^5-z*| lies below the double-precision floor {}; rerun with --precision extended",
            sci(t.double_floor)
        );
    } else {
        let _ = writeln!(
            s,
            "* computed in double-double arithmetic; |z^5-z*| lies below the double-precision floor {}",
            sci(t.double_floor)
        );
    }
    s
}

fn table1_csv(t: &Table1) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Input(format!("csv: {e}"));
    w.write_record([
        "k",
        "dist",
        "next_dist",
        "linear_ratio",
        "quadratic_ratio",
        "precision",
    ])
    .map_err(io)?;
    for r in &t.rows {
        w.write_record([
            r.k.to_string(),
            format!("{:?}", r.dist),
            format!("{:?}", r.next_dist),
            format!("{:?}", r.linear_ratio),
            format!("{:?}", r.quadratic_ratio),
            r.precision.as_str().to_string(),
        ])
        .map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| Error::Input(format!("csv: {e}")))
}

fn cmd_table1(precision: Precision, csv_path: Option<&Path>) -> Result<ExitCode> {
    let t = table1(precision == Precision::Extended)?;
    if let Some(path) = csv_path {
        write_file_atomic(path, &table1_csv(&t)?)?;
    }
    print!("{}", format_table1(&t));
    Ok(ExitCode::SUCCESS)
}

fn observed_text(c: &ccrm::tables::Table2Cell) -> String {
    match c.observed {
        Some(RateClass::Quadratic { constant }) => format!("quadratic ({})", sci(constant)),
        Some(o) => o.to_string(),
        None => "unclassified".to_string(),
    }
}

fn expected_text(c: &ccrm::tables::Table2Cell) -> String {
    match c.expected {
        ccrm::catalog::ExpectedRate::Linear { constant: Some(k) } => format!("linear ({k:.3})"),
        e => e.name().to_string(),
    }
}

fn format_table2(t: &Table2) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>4} {:>4} {:>9} {:>5}  {:<18} {:<22} {:>6}  {}",
        "beta", "alpha", "Y", "meth", "expected", "observed", "iters", "check"
    );
    for c in &t.cells {
        let check = match (c.graded, c.matches) {
            (false, _) => "n/a",
            (true, true) => "ok",
            (true, false) => "MISMATCH",
        };
        let _ = writeln!(
            s,
            "{:>4} {:>5} {:>9} {:>5}  {:<18} {:<22} {:>6}  {check}",
            c.beta,
            c.alpha,
            c.variant.as_str(),
            c.method.as_str(),
            expected_text(c),
            observed_text(c),
            c.iterations
        );
    }
    let _ = writeln!(s, "precision: {}", t.precision);
    s
}

fn table2_csv(t: &Table2) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Input(format!("csv: {e}"));
    w.write_record([
        "beta",
        "alpha",
        "variant",
        "method",
        "expected",
        "observed",
        "constant",
        "iterations",
        "termination",
        "graded",
        "matches",
    ])
    .map_err(io)?;
    for c in &t.cells {
        w.write_record([
            c.beta.to_string(),
            c.alpha.to_string(),
            c.variant.as_str().to_string(),
            c.method.as_str().to_string(),
            c.expected.name().to_string(),
            c.observed.as_ref().map_or("", |o| o.name()).to_string(),
            c.observed
                .and_then(|o| o.constant())
                .map_or(String::new(), |k| format!("{k:?}")),
            c.iterations.to_string(),
            c.termination.as_str().to_string(),
            c.graded.to_string(),
            c.matches.to_string(),
        ])
        .map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| Error::Input(format!("csv: {e}")))
}

fn cmd_table2(
    precision: Precision,
    threads: Option<usize>,
    csv_path: Option<&Path>,
) -> Result<ExitCode> {
    let threads = match threads {
        Some(0) => return Err(Error::Input("--threads must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let t = table2(precision, threads)?;
    if let Some(path) = csv_path {
        write_file_atomic(path, &table2_csv(&t)?)?;
    }
    print!("{}", format_table2(&t));
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
#[serde(untagged)]
enum Outcome<T> {
    Ok(T),
    Err { error: String },
}

impl<T> From<Result<T>> for Outcome<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Err {
                error: e.to_string(),
            },
        }
    }
}

#[derive(Serialize)]
struct Predicted {
    /// 4·max κ / ω.
    theorem_bound: f64,
    /// max κ / ω.
    sharper_bound: f64,
}

#[derive(Serialize)]
struct DiagnoseReport {
    problem: String,
    point: Vec<f64>,
    curvature_x: Outcome<CurvatureValue>,
    curvature_y: Outcome<CurvatureValue>,
    omega: Outcome<OmegaEstimate>,
    known_constants: Option<KnownConstants>,
    /// From the computed curvatures and estimated ω.
    predicted: Option<Predicted>,
    /// From the problem's known constants.
    predicted_known: Option<Predicted>,
}

fn predicted(kappa: f64, omega: f64) -> Predicted {
    Predicted {
        theorem_bound: 4.0 * kappa / omega,
        sharper_bound: kappa / omega,
    }
}

fn cmd_diagnose(problem_arg: &str, point: Option<&str>) -> Result<ExitCode> {
    let loaded = load_problem(problem_arg)?;
    let p = loaded.problem;
    let z = match point {
        Some(text) => parse_point(text, p.dim(), "point")?,
        None => p.reference_solution.clone().ok_or_else(|| {
            Error::Input("the problem has no reference point; pass --point".into())
        })?,
    };
    let kx = curvature(&p.x, &z);
    let ky = curvature(&p.y, &z);
    let omega = estimate_omega(&p, &z, &OMEGA_RADII, OMEGA_SAMPLES, OMEGA_SEED);
    let predicted_now = match (&kx, &ky, &omega) {
        (Ok(a), Ok(b), Ok(w)) if w.omega > 0.0 => Some(predicted(a.kappa.max(b.kappa), w.omega)),
        _ => None,
    };
    let report = DiagnoseReport {
        problem: loaded.name,
        point: z.iter().copied().collect(),
        curvature_x: kx.into(),
        curvature_y: ky.into(),
        omega: omega.into(),
        known_constants: p.known_constants,
        predicted: predicted_now,
        predicted_known: p.known_constants.map(|c| predicted(c.kappa(), c.omega)),
    };
    println!("{}", to_json(&report));
    Ok(ExitCode::SUCCESS)
}
