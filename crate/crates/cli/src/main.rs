//! Solvability analysis of linear boundary-value problems from the command
//! line: `analyze` reports the characteristic matrix and Fredholm numbers,
//! `solve` produces and classifies solutions, `verify` runs closed-form
//! oracles and property probes.
//!
//! Exit codes: 0 success (an inconsistent problem is a successful
//! analysis), 1 verification failure, 2 input or validation error,
//! 3 numerical failure.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fredbvp::characteristic::{characteristic_matrix, fredholm_analysis};
use fredbvp::fundamental::FundamentalMatrix;
use fredbvp::oracle::{
    self, boundary_action_probe, continuity_probe, cross_check, random_direction, OracleReport,
    SplitMix64,
};
use fredbvp::problem::{parse_problem, ProblemSpec};
use fredbvp::sobolev::{sobolev_slobodetsky_norm, DerivativeSamples};
use fredbvp::solver::{solve, SolveOptions};
use fredbvp::Error;
use fredbvp_cli::error_exit_code;
use fredbvp_cli::report::{AnalyzeDoc, NormDoc, OracleDoc, SolveDoc, VerifyDoc};

/// Deterministic seed for the built-in corpus and probe directions.
const CORPUS_SEED: u64 = 0x5eed_beef;

/// Instances per closed-form class in the built-in corpus.
const CORPUS_PER_CLASS: usize = 100;

#[derive(Parser)]
#[command(
    name = "fredbvp",
    version,
    about = "Solvability analysis and solution of linear ODE boundary-value problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the characteristic matrix and report rank, kernel, cokernel,
    /// index, and invertibility.
    Analyze(AnalyzeArgs),
    /// Solve the problem and classify it as unique, family, or
    /// inconsistent.
    Solve(SolveArgs),
    /// Run closed-form oracles and property probes.
    Verify(VerifyArgs),
}

/// Tolerances must be positive finite numbers.
fn positive_f64(text: &str) -> Result<f64, String> {
    let value: f64 = text
        .parse()
        .map_err(|e| format!("not a number: {e}"))?;
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(String::from("must be positive and finite"))
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Number of integration steps (at least 16).
    #[arg(long = "grid", default_value_t = 1024, value_parser = clap::value_parser!(u64).range(16..))]
    grid: u64,
    /// Absolute singular-value cutoff overriding the default relative rule.
    #[arg(long = "rank-tol", value_parser = positive_f64)]
    rank_tol: Option<f64>,
    /// Output format.
    #[arg(long = "format", value_parser = ["json", "text"], default_value = "json")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Problem file (JSON).
    input: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem file (JSON).
    input: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
    /// Base factor for the consistency threshold.
    #[arg(long = "consistency-tol", value_parser = positive_f64)]
    consistency_tol: Option<f64>,
    /// Include the solution samples and grid in the report.
    #[arg(long = "samples")]
    samples: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Problem file (JSON); omit with --corpus.
    input: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
    /// Run the built-in deterministic corpus instead of a problem file.
    #[arg(long = "corpus")]
    corpus: bool,
    /// Include fractional Sobolev norms of the right-hand side components.
    #[arg(long = "norms")]
    norms: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Solve(args) => run_solve(args),
        Command::Verify(args) => run_verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(error_exit_code(&err))
        }
    }
}

fn load_problem(path: &PathBuf) -> Result<ProblemSpec, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Syntax(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text)
}

fn emit(common: &CommonArgs, json: String, text: String) -> Result<(), Error> {
    let body = if common.format == "text" { text } else { json };
    match &common.output {
        Some(path) => fs::write(path, body)
            .map_err(|e| Error::Syntax(format!("cannot write {}: {e}", path.display()))),
        None => match io::stdout().write_all(body.as_bytes()) {
            // a closed downstream pipe is not a failure of ours
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            other => other.map_err(|e| Error::Syntax(format!("cannot write to stdout: {e}"))),
        },
    }
}

fn to_json<T: serde::Serialize>(doc: &T) -> String {
    let mut body = serde_json::to_string_pretty(doc).expect("report serialization cannot fail");
    body.push('\n');
    body
}

fn run_analyze(args: AnalyzeArgs) -> Result<ExitCode, Error> {
    let problem = load_problem(&args.input)?;
    problem.validate()?;
    let y = FundamentalMatrix::compute(&problem, args.common.grid as usize)?;
    let matrix = characteristic_matrix(&y, &problem, args.common.rank_tol)?;
    let report = fredholm_analysis(&matrix);
    let doc = AnalyzeDoc::new(&matrix.entries, &report);
    emit(&args.common, to_json(&doc), doc.render_text())?;
    Ok(ExitCode::SUCCESS)
}

fn run_solve(args: SolveArgs) -> Result<ExitCode, Error> {
    let problem = load_problem(&args.input)?;
    let options = SolveOptions {
        grid_size: args.common.grid as usize,
        rank_tolerance: args.common.rank_tol,
        consistency_tolerance: args.consistency_tol,
    };
    let solution = solve(&problem, &options)?;
    let doc = SolveDoc::new(&solution, args.samples);
    emit(&args.common, to_json(&doc), doc.render_text())?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let grid = args.common.grid as usize;
    let mut reports: Vec<OracleReport> = Vec::new();
    let mut norms: Option<Vec<NormDoc>> = None;

    if args.corpus {
        if args.norms {
            return Err(Error::Syntax(String::from(
                "--norms needs a problem file; the corpus has no right-hand side to measure",
            )));
        }
        reports.extend(corpus_reports(grid, args.common.rank_tol)?);
    } else {
        let input = args
            .input
            .as_ref()
            .ok_or_else(|| Error::Syntax(String::from("provide a problem file or use --corpus")))?;
        let problem = load_problem(input)?;
        problem.validate()?;
        reports.push(cross_check(&problem, grid, args.common.rank_tol)?);
        reports.push(boundary_action_probe(&problem, grid, 20, CORPUS_SEED)?);
        let mut rng = SplitMix64::new(CORPUS_SEED ^ 1);
        let direction = random_direction(problem.dimension, &mut rng);
        reports.push(continuity_probe(
            &problem,
            &direction,
            &[1e-2, 1e-3, 1e-4],
            grid,
        )?);
        if args.norms {
            let order = problem.space.integer_order();
            let mut docs = Vec::with_capacity(problem.dimension);
            for component in 0..problem.dimension {
                let samples = DerivativeSamples::from_component(
                    &problem.rhs,
                    &problem.interval,
                    component,
                    grid,
                    order,
                )?;
                let breakdown =
                    sobolev_slobodetsky_norm(&samples, problem.space.s, problem.space.p)?;
                docs.push(NormDoc::new(component, &breakdown));
            }
            norms = Some(docs);
        }
    }

    let all_passed = reports.iter().all(|r| r.pass);
    let doc = VerifyDoc {
        all_passed,
        reports: reports.iter().map(OracleDoc::new).collect(),
        norms,
    };
    emit(&args.common, to_json(&doc), doc.render_text())?;
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Built-in corpus: cross-checks over both closed-form classes, the
/// boundary-action identity, and a continuity probe on a fixed fixture.
fn corpus_reports(grid: usize, rank_tol: Option<f64>) -> Result<Vec<OracleReport>, Error> {
    let corpus = oracle::builtin_corpus(CORPUS_SEED, CORPUS_PER_CLASS, CORPUS_PER_CLASS);
    let mut one_point_cases = Vec::new();
    let mut two_point_cases = Vec::new();
    for (i, problem) in corpus.iter().enumerate() {
        let report = cross_check(problem, grid, rank_tol)?;
        let case = fredbvp::oracle::OracleCase {
            label: format!("instance {i}: max error {:.3e}", report.max_abs_error),
            error: if report.pass {
                report.max_abs_error
            } else {
                1.0
            },
        };
        if i < CORPUS_PER_CLASS {
            one_point_cases.push(case);
        } else {
            two_point_cases.push(case);
        }
    }
    let aggregate = |name: &str, tolerance: f64, cases: Vec<fredbvp::oracle::OracleCase>| {
        let max_abs_error = cases.iter().fold(0.0f64, |acc, c| acc.max(c.error));
        OracleReport {
            oracle: String::from(name),
            max_abs_error,
            tolerance,
            pass: max_abs_error <= tolerance,
            cases,
        }
    };
    let mut reports = vec![
        aggregate("one_point_constant_corpus", 1e-8, one_point_cases),
        aggregate("two_point_zero_corpus", 1e-4, two_point_cases),
    ];

    // boundary-action identity across a slice of the corpus
    let mut action_cases = Vec::new();
    for (i, problem) in corpus.iter().take(20).enumerate() {
        let probe = boundary_action_probe(problem, grid, 5, CORPUS_SEED ^ i as u64)?;
        action_cases.extend(probe.cases);
    }
    reports.push(aggregate("boundary_action_identity", 1e-8, action_cases));

    // continuity of the coefficient-to-fundamental-matrix map on a fixture
    let fixture = &corpus[0];
    let mut rng = SplitMix64::new(CORPUS_SEED ^ 2);
    let direction = random_direction(fixture.dimension, &mut rng);
    reports.push(continuity_probe(
        fixture,
        &direction,
        &[1e-2, 1e-3, 1e-4],
        grid,
    )?);
    Ok(reports)
}
