//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.

pub mod csv_io;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dgp::{generate, DgpKind, DgpSpec, Generated, TrendSpec};
use crate::error::{Error, ErrorKind, Result};
use crate::hypothesis::{
    classical_wald_test_with, cross_correlation_perm_test, ljung_box_perm_test, regression_perm_test,
    trend_perm_test, TestOutcome, WaldForm,
};
use crate::model::{Bandwidth, Floor, Region, Tail, TestConfig, DEFAULT_ALPHA, DEFAULT_PERMUTATIONS};
use crate::montecarlo::{run_study_with_threads, table_spec, McReport, StudySpec};
use crate::permutation::PermutationMode;

pub const SCHEMA_VERSION: &str = "1";

/// Machine-readable result of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub invocation: Vec<String>,
    pub outcome: ReportOutcome,
    pub timing_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReportOutcome {
    Test(TestOutcome),
    Study(McReport),
}

#[derive(Parser, Debug)]
#[command(name = "tsperm", version, about = "Studentized permutation tests for time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single test on a CSV file.
    #[command(subcommand)]
    Test(TestCommand),
    /// Write a simulated data set to CSV.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo study described by a JSON file.
    Study(StudyArgs),
    /// Re-run one of the built-in rejection-rate tables.
    Reproduce(ReproduceArgs),
}

#[derive(Subcommand, Debug)]
enum TestCommand {
    /// Permutation test that all regression coefficients are zero.
    Regression(RegressionArgs),
    /// Permutation test for the absence of a monotone trend.
    Trend(TrendArgs),
    /// Joint permutation test of the first autocorrelations.
    LjungBox(LjungBoxArgs),
    /// Joint permutation test of (lagged) cross-correlations.
    CrossCorr(CrossCorrArgs),
    /// Classical chi-squared Wald test.
    Classical(ClassicalArgs),
}

fn parse_bandwidth(s: &str) -> std::result::Result<Bandwidth, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_floor(s: &str) -> std::result::Result<Floor, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
    permutations: usize,
    /// Number of lags in the long-run variance, or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_bandwidth)]
    bandwidth: Bandwidth,
    /// Eigenvalue floor: a positive number, `auto` or `off`.
    #[arg(long, default_value = "auto", value_parser = parse_floor)]
    floor: Floor,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumerate all n! permutations (n <= 8).
    #[arg(long)]
    exhaustive: bool,
    /// Include the permutation samples in the report.
    #[arg(long)]
    keep_samples: bool,
    /// Report path; the report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> TestConfig {
        TestConfig {
            alpha: self.alpha,
            permutations: self.permutations,
            seed: self.seed,
            bandwidth: self.bandwidth,
            floor: self.floor,
            mode: if self.exhaustive {
                PermutationMode::Exhaustive
            } else {
                PermutationMode::Sampled
            },
            keep_samples: self.keep_samples,
            ..TestConfig::default()
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RegionArg {
    Sphere,
    Box,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TailArg {
    Upper,
    TwoSided,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum WaldFormArg {
    Standard,
    AsPrinted,
}

#[derive(Args, Debug)]
struct RegressionArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    response: String,
    #[arg(long, value_enum, default_value = "sphere")]
    region: RegionArg,
    #[arg(long)]
    no_studentize: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct TrendArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    column: String,
    #[arg(long, value_enum, default_value = "upper")]
    tail: TailArg,
    #[arg(long)]
    no_studentize: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct LjungBoxArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    column: String,
    #[arg(long)]
    lags: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CrossCorrArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    response: String,
    /// Comma-separated covariate lags.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    lags: Vec<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ClassicalArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    response: String,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "standard")]
    wald_form: WaldFormArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DgpArg {
    MdepReg,
    Var2,
    Ar1,
    MdepSeries,
    Iid,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    dgp: DgpArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dependence range for the m-dependent designs.
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    /// Number of covariates for `mdep-reg` (and `iid`, which otherwise emits a series).
    #[arg(long)]
    p: Option<usize>,
    /// Add the local trend `h i / n^{3/2}` (series designs only).
    #[arg(long)]
    trend_h: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Also write one CSV row per cell.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    table: u8,
    #[arg(long, default_value_t = 0.1)]
    scale: f64,
    #[arg(long)]
    threads: Option<usize>,
    /// Override the number of permutations per test.
    #[arg(long)]
    permutations: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Usage => 1,
        ErrorKind::Data => 2,
        ErrorKind::Numerical => 3,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let invocation = args.iter().skip(1).cloned().collect();
    match run(cli.command, invocation) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.kind())
        }
    }
}

fn emit(doc: &ReportDocument, out: Option<&Path>, summary: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| Error::Io(e.to_string()))? + "\n";
    match out {
        Some(path) => {
            csv_io::write_text(path, &text)?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn test_summary(o: &TestOutcome) -> String {
    format!(
        "{}: statistic {:.6}, p-value {:.6}, {} at alpha {} (n = {}, p = {})",
        o.method,
        o.statistic,
        o.p_value,
        if o.reject { "reject" } else { "do not reject" },
        o.alpha,
        o.n,
        o.p
    )
}

fn run(command: Command, invocation: Vec<String>) -> Result<()> {
    let start = Instant::now();
    let document = |outcome: ReportOutcome| ReportDocument {
        schema_version: SCHEMA_VERSION.to_string(),
        invocation: invocation.clone(),
        outcome,
        timing_secs: start.elapsed().as_secs_f64(),
    };
    match command {
        Command::Test(test) => {
            let (outcome, out) = run_test(test)?;
            let summary = test_summary(&outcome);
            emit(&document(ReportOutcome::Test(outcome)), out.as_deref(), &summary)
        }
        Command::Simulate(args) => simulate(args),
        Command::Study(args) => {
            let text = std::fs::read_to_string(&args.spec).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => Error::FileNotFound(args.spec.clone()),
                _ => Error::Io(format!("{}: {e}", args.spec.display())),
            })?;
            let spec: StudySpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: e.line() as u64,
                column: e.column().to_string(),
                message: e.to_string(),
            })?;
            let report = run_study_with_threads(&spec, args.threads)?;
            finish_study(document(ReportOutcome::Study(report.clone())), &report, &args.out, args.csv.as_deref())
        }
        Command::Reproduce(args) => {
            let spec = table_spec(args.table, args.scale, args.permutations, args.seed)?;
            let report = run_study_with_threads(&spec, args.threads)?;
            finish_study(document(ReportOutcome::Study(report.clone())), &report, &args.out, args.csv.as_deref())
        }
    }
}

fn finish_study(doc: ReportDocument, report: &McReport, out: &Path, csv: Option<&Path>) -> Result<()> {
    if let Some(path) = csv {
        let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        report.write_csv(file)?;
    }
    let summary = format!(
        "{} cells, {} replications each, report written to {}",
        report.cells.len(),
        report.cells.first().map_or(0, |c| c.replications),
        out.display()
    );
    emit(&doc, Some(out), &summary)
}

fn run_test(command: TestCommand) -> Result<(TestOutcome, Option<PathBuf>)> {
    match command {
        TestCommand::Regression(a) => {
            let data = csv_io::read_dataset(&a.data, &a.response)?;
            let cfg = TestConfig {
                region: match a.region {
                    RegionArg::Sphere => Region::Sphere,
                    RegionArg::Box => Region::Box,
                },
                studentize: !a.no_studentize,
                ..a.common.config()
            };
            Ok((regression_perm_test(&data, &cfg)?, a.common.out))
        }
        TestCommand::Trend(a) => {
            let series = csv_io::read_series(&a.data, &a.column)?;
            let cfg = TestConfig {
                tail: match a.tail {
                    TailArg::Upper => Tail::Upper,
                    TailArg::TwoSided => Tail::TwoSided,
                },
                studentize: !a.no_studentize,
                ..a.common.config()
            };
            Ok((trend_perm_test(&series, &cfg)?, a.common.out))
        }
        TestCommand::LjungBox(a) => {
            let series = csv_io::read_series(&a.data, &a.column)?;
            Ok((ljung_box_perm_test(&series, a.lags, &a.common.config())?, a.common.out))
        }
        TestCommand::CrossCorr(a) => {
            let data = csv_io::read_dataset(&a.data, &a.response)?;
            Ok((cross_correlation_perm_test(&data, &a.lags, &a.common.config())?, a.common.out))
        }
        TestCommand::Classical(a) => {
            let data = csv_io::read_dataset(&a.data, &a.response)?;
            let form = match a.wald_form {
                WaldFormArg::Standard => WaldForm::Standard,
                WaldFormArg::AsPrinted => WaldForm::AsPrinted,
            };
            Ok((classical_wald_test_with(&data, a.alpha, form)?, a.out))
        }
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let kind = match a.dgp {
        DgpArg::MdepReg => DgpKind::MdepRegression { m: a.m, p: a.p.unwrap_or(3) },
        DgpArg::Var2 => DgpKind::Var2 { rho: a.rho },
        DgpArg::Ar1 => DgpKind::Ar1 { rho: a.rho },
        DgpArg::MdepSeries => DgpKind::MdepSeries { m: a.m },
        DgpArg::Iid => DgpKind::IidGauss { p: a.p },
    };
    let spec = DgpSpec {
        kind,
        n: a.n,
        seed: a.seed,
        trend: a.trend_h.map(|h| TrendSpec::Local { h }),
    };
    let summary = match generate(&spec)? {
        Generated::Dataset(d) => {
            csv_io::write_dataset(&a.out, &d)?;
            format!("{}: n = {}, p = {} written to {}", spec.kind, d.n(), d.p(), a.out.display())
        }
        Generated::Series(s) => {
            csv_io::write_series(&a.out, &s)?;
            format!("{}: n = {} written to {}", spec.kind, s.len(), a.out.display())
        }
    };
    println!("{summary}");
    Ok(())
}
