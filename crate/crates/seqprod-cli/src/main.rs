//! Command-line front door: run verification suites, reproduce the built-in
//! counterexamples, and certify maps loaded from JSON files.
//!
//! Exit codes are a stable contract: 0 for a clean pass (or, for `certify`,
//! any successfully parsed file), 1 when a property or expected pattern
//! fails, 2 for usage and parse errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use seqprod::json::MatrixJson;
use seqprod::suite::{
    certify_map, run_counterexample, run_suite, CounterexampleReport, PropertyStatus, RunConfig,
    Suite, SuiteReport, DEFAULT_SEED,
};
use seqprod::Tolerances;

#[derive(Parser)]
#[command(
    name = "seqprod",
    version,
    about = "Verification suites, counterexamples and map certification for sequential products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and report one line per property.
    Verify {
        /// One of: linalg, effects, processes, universal, axioms, all.
        suite: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Reproduce a named counterexample and check its failure pattern.
    Counterexample {
        /// One of: ax1-pqp, ax2-sign, ax4-phase.
        name: String,
        /// Tolerance override NAME=VALUE; repeatable.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Parse a map file ("kraus" or "superop" form) and certify it.
    Certify {
        /// Path to the JSON file describing the map.
        path: PathBuf,
        /// Seed for the sampled verdicts; SEQPROD_SEED provides the default.
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance override NAME=VALUE; repeatable.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Root seed; SEQPROD_SEED provides the default when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Instances per property.
    #[arg(long)]
    samples: Option<usize>,
    /// Algebra shapes as semicolon-separated comma lists, e.g. "2;3;2,2".
    #[arg(long)]
    dims: Option<String>,
    /// Tolerance override NAME=VALUE; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Print the JSON report to stdout instead of the text summary.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Verify { suite, run } => cmd_verify(&suite, &run),
        Command::Counterexample { name, tol, output } => cmd_counterexample(&name, &tol, &output),
        Command::Certify { path, seed, tol, output } => cmd_certify(&path, seed, &tol, &output),
    }
}

fn cmd_verify(suite: &str, run: &RunArgs) -> Result<ExitCode, String> {
    let suite = Suite::parse(suite).map_err(|e| e.to_string())?;
    let mut config = RunConfig { seed: resolve_seed(run.seed)?, ..RunConfig::default() };
    if let Some(samples) = run.samples {
        config.samples = samples;
    }
    if let Some(dims) = &run.dims {
        config.dims = parse_dims(dims)?;
    }
    apply_tol_overrides(&run.tol, &mut config.tols)?;
    config.validate().map_err(|e| e.to_string())?;

    let report = run_suite(suite, &config).map_err(|e| e.to_string())?;
    emit(&report.to_json(), &run.output, |out| print_verify_summary(&report, out));
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn print_verify_summary(report: &SuiteReport, out: &mut String) {
    let dims: Vec<String> = report
        .dims
        .iter()
        .map(|shape| shape.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    out.push_str(&format!(
        "suite {}  seed {}  samples {}  dims {}\n",
        report.suite,
        report.seed,
        report.samples,
        dims.join(";")
    ));
    let mut passed = 0;
    for p in &report.properties {
        let status = match p.status {
            PropertyStatus::Pass => {
                passed += 1;
                "pass"
            }
            PropertyStatus::Fail => "FAIL",
            PropertyStatus::NotDecidable => "UNDECIDED",
        };
        out.push_str(&format!("{status:9} {}", p.property));
        if let Some(residual) = p.residual {
            out.push_str(&format!("  residual {residual:.3e}"));
        }
        if let Some(detail) = &p.detail {
            out.push_str(&format!("  ({detail})"));
        }
        out.push('\n');
    }
    out.push_str(&format!("{} properties, {} passed\n", report.properties.len(), passed));
}

fn cmd_counterexample(
    name: &str,
    tol: &[String],
    output: &OutputArgs,
) -> Result<ExitCode, String> {
    let mut tols = Tolerances::default();
    apply_tol_overrides(tol, &mut tols)?;
    let report = run_counterexample(name, &tols).map_err(|e| e.to_string())?;
    let json = counterexample_json(&report);
    emit(&json, output, |out| print_counterexample_summary(&report, out));
    Ok(if report.fixture_matches { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn counterexample_json(report: &CounterexampleReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

fn print_counterexample_summary(report: &CounterexampleReport, out: &mut String) {
    out.push_str(&format!(
        "counterexample {}  candidate `{}`  algebra {:?}\n",
        report.name, report.candidate, report.algebra
    ));
    for note in &report.notes {
        out.push_str(&format!("  {note}\n"));
    }
    out.push('\n');
    for (label, matrix) in &report.matrices {
        out.push_str(&format!("{label}:\n{}\n", format_matrix(matrix)));
    }
    for (label, value) in &report.gaps {
        out.push_str(&format!("{label} = {value}\n"));
    }
    out.push_str(&format!(
        "\nexpected failures: {}  observed: {}\n",
        report.expected_failures.join(", "),
        report.observed_failures.join(", ")
    ));
    if !report.undecided.is_empty() {
        out.push_str(&format!("undecided: {}\n", report.undecided.join(", ")));
    }
    out.push_str(if report.fixture_matches {
        "pattern and frozen values reproduced\n"
    } else {
        "MISMATCH against the frozen fixture\n"
    });
}

fn cmd_certify(
    path: &PathBuf,
    seed: Option<u64>,
    tol: &[String],
    output: &OutputArgs,
) -> Result<ExitCode, String> {
    let mut tols = Tolerances::default();
    apply_tol_overrides(tol, &mut tols)?;
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let map = seqprod::json::map_from_str(&text)
        .map_err(|e| format!("cannot parse {}: {e}", path.display()))?;
    let record = certify_map(&map, resolve_seed(seed)?, &tols).map_err(|e| e.to_string())?;

    let mut json = serde_json::to_string_pretty(&record).expect("record serializes");
    json.push('\n');
    emit(&json, output, |out| {
        out.push_str(&format!(
            "map from {:?} to {:?} ({} form)\n",
            record.source, record.target, record.form
        ));
        for (name, verdict) in record.entries() {
            out.push_str(&format!("{name:24} {verdict}\n"));
        }
    });
    // Certification is a report, not a judgment: parsing succeeded, exit 0.
    Ok(ExitCode::SUCCESS)
}

/// Print either the JSON or the text summary, and mirror the JSON to a file
/// when requested.
fn emit(json: &str, output: &OutputArgs, summarize: impl FnOnce(&mut String)) {
    if let Some(path) = &output.out {
        if let Err(e) = fs::write(path, json) {
            eprintln!("warning: cannot write {}: {e}", path.display());
        }
    }
    if output.json {
        print!("{json}");
    } else {
        let mut out = String::new();
        summarize(&mut out);
        print!("{out}");
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("SEQPROD_SEED") {
        Ok(text) => {
            text.trim().parse().map_err(|_| format!("SEQPROD_SEED is not an integer: `{text}`"))
        }
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_SEED),
        Err(e) => Err(format!("SEQPROD_SEED: {e}")),
    }
}

fn parse_dims(text: &str) -> Result<Vec<Vec<usize>>, String> {
    let mut shapes = Vec::new();
    for part in text.split(';') {
        let shape = part
            .split(',')
            .map(|d| {
                d.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad dimension `{}` in --dims", d.trim()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        shapes.push(shape);
    }
    Ok(shapes)
}

fn apply_tol_overrides(overrides: &[String], tols: &mut Tolerances) -> Result<(), String> {
    for entry in overrides {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| format!("--tol expects NAME=VALUE, got `{entry}`"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("--tol {}: `{}` is not a number", name.trim(), value.trim()))?;
        tols.set(name.trim(), value).map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Rows of aligned complex entries; real parts only when the matrix is real.
fn format_matrix(matrix: &MatrixJson) -> String {
    let cols = matrix.dim.or(matrix.cols).unwrap_or(matrix.entries.len());
    let cells: Vec<String> = matrix
        .entries
        .iter()
        .map(|&(re, im)| {
            if im.abs() < 1e-12 {
                format!("{re:.6}")
            } else {
                format!("{re:.6}{im:+.6}i")
            }
        })
        .collect();
    let width = cells.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut out = String::new();
    for row in cells.chunks(cols.max(1)) {
        out.push_str("  [ ");
        let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&padded.join("  "));
        out.push_str(" ]\n");
    }
    out
}
