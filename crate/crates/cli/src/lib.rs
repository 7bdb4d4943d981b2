//! Command-line surface of `cycl`: metric checks, majorization, sampling
//! and the oracle suites, all writing JSON.

pub mod input;
pub mod svg;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use cycl::conditions::{
    boxtimes_check, cat4_check, cycl4_check, cycl_n_verify, wir_check, ConditionReport, PolygonCheck, WirMode,
    WIR_BUDGET,
};
use cycl::majorize::{canonicalize, majorize, ComparisonMapJson, MajorizeError};
use cycl::metric::{sample_model_subset, snowflake};
use cycl::model::{Kappa, Regime};
use cycl::oracle::{lemma_property_suite, SuiteKind};
use cycl::tolerance;
use serde::{Deserialize, Serialize};

use crate::input::{parse_matrix, parse_tuple, to_csv, MatrixFile};
use crate::svg::{render_svg, Projection};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BREAKDOWN: i32 = 3;

/// Environment variable overriding the global tolerance.
pub const TOLERANCE_VAR: &str = "KM_TOL";

#[derive(Debug, Parser)]
#[command(name = "cycl", version, about = "Curvature conditions and comparison polygons for finite metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the metric conditions for a curvature bound.
    Check {
        input: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        kappa: f64,
        /// Also check the Wir_n inequalities over all maps of Z/n.
        #[arg(long)]
        wir: Option<usize>,
    },
    /// Build a convex comparison polygon for a cyclic tuple.
    Majorize {
        input: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        kappa: f64,
        /// Comma-separated point indices; defaults to all points in order.
        #[arg(long)]
        tuple: Option<String>,
        /// Write an SVG drawing of the polygon here.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Projection::Auto)]
        projection: Projection,
        #[arg(long, default_value_t = 480)]
        size: u32,
    },
    /// Raise every distance to the power alpha.
    Snowflake {
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Sample points of a model plane and print their distance matrix.
    Gen {
        #[arg(long, value_enum)]
        model: ModelName,
        #[arg(long)]
        n: usize,
        /// Defaults to 0, 1 or -1 according to the model.
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a candidate comparison polygon against a metric.
    Verify {
        input: PathBuf,
        /// Comparison map JSON, as written by `majorize`.
        map: PathBuf,
        /// Defaults to the tuple recorded in the map, else all points.
        #[arg(long)]
        tuple: Option<String>,
    },
    /// Run a randomized lemma suite.
    Oracle {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Plane,
    Sphere,
    Hyperbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SuiteArg {
    AlexandrovLarger,
    AlexandrovSmaller,
    Crossing,
    QuadrupleP,
    AngleCalculus,
}

impl From<SuiteArg> for SuiteKind {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::AlexandrovLarger => SuiteKind::AlexandrovLarger,
            SuiteArg::AlexandrovSmaller => SuiteKind::AlexandrovSmaller,
            SuiteArg::Crossing => SuiteKind::Crossing,
            SuiteArg::QuadrupleP => SuiteKind::QuadrupleP,
            SuiteArg::AngleCalculus => SuiteKind::AngleCalculus,
        }
    }
}

/// Output of `check`.
#[derive(Debug, Serialize, Deserialize)]
pub struct CheckOutput {
    pub kappa: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub passed: bool,
    pub reports: Vec<ConditionReport>,
}

/// Output of `majorize`, also accepted by `verify`.
#[derive(Debug, Serialize, Deserialize)]
pub struct MapOutput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<usize>>,
    #[serde(flatten)]
    pub map: ComparisonMapJson,
}

#[derive(Debug, Serialize)]
struct ErrorOutput<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<[usize; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<f64>,
}

/// Failure of a command: an exit code and a message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: e.to_string(),
    }
}

fn kappa_arg(value: f64) -> Result<Kappa, Failure> {
    Kappa::try_new(value).map_err(input_error)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Applies `KM_TOL` if set.
pub fn apply_tolerance_env() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(TOLERANCE_VAR) else {
        return Ok(());
    };
    match raw.trim().parse::<f64>() {
        Ok(v) if tolerance::set_eps(v) => Ok(()),
        _ => Err(input_error(format!("{TOLERANCE_VAR}={raw:?} is not a positive number"))),
    }
}

/// Runs one command, writing its primary output to `out`. Returns the
/// exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    apply_tolerance_env()?;
    let (text, code) = match cli.command {
        Command::Check { input, kappa, wir } => check(&input, kappa_arg(kappa)?, wir)?,
        Command::Majorize {
            input,
            kappa,
            tuple,
            svg,
            projection,
            size,
        } => run_majorize(&input, kappa_arg(kappa)?, tuple.as_deref(), svg, projection, size)?,
        Command::Snowflake { input, alpha, format } => {
            let lm = parse_matrix(&input).map_err(input_error)?;
            let m = snowflake(&lm.metric, alpha).map_err(input_error)?;
            let text = match format {
                Format::Json => json(&MatrixFile {
                    labels: lm.labels,
                    matrix: m.rows(),
                    points: None,
                }),
                Format::Csv => to_csv(&m),
            };
            (text, EXIT_OK)
        }
        Command::Gen { model, n, kappa, seed } => (gen(model, n, kappa, seed)?, EXIT_OK),
        Command::Verify { input, map, tuple } => verify(&input, &map, tuple.as_deref())?,
        Command::Oracle {
            suite,
            kappa,
            trials,
            seed,
        } => {
            let report = lemma_property_suite(suite.into(), kappa_arg(kappa)?, trials, seed);
            let code = if report.clean() { EXIT_OK } else { EXIT_VIOLATION };
            (json(&report), code)
        }
    };
    out.write_all(text.as_bytes()).map_err(input_error)?;
    Ok(code)
}

fn check(input: &std::path::Path, kappa: Kappa, wir: Option<usize>) -> Result<(String, i32), Failure> {
    let lm = parse_matrix(input).map_err(input_error)?;
    let m = &lm.metric;
    let mut reports = Vec::new();
    if kappa.regime() == Regime::Plane {
        reports.push(boxtimes_check(m));
    }
    reports.push(cat4_check(m, kappa));
    reports.push(cycl4_check(m, kappa));
    if let Some(n) = wir {
        reports.push(wir_check(m, n, WirMode::AllMaps, WIR_BUDGET).map_err(input_error)?);
    }
    let passed = reports.iter().all(ConditionReport::passed);
    let output = CheckOutput {
        kappa: kappa.value(),
        points: m.len(),
        labels: lm.labels,
        passed,
        reports,
    };
    Ok((json(&output), if passed { EXIT_OK } else { EXIT_VIOLATION }))
}

fn run_majorize(
    input: &std::path::Path,
    kappa: Kappa,
    tuple: Option<&str>,
    svg: Option<PathBuf>,
    projection: Projection,
    size: u32,
) -> Result<(String, i32), Failure> {
    let lm = parse_matrix(input).map_err(input_error)?;
    let t = parse_tuple(tuple, lm.metric.len()).map_err(input_error)?;
    let projection = projection.resolve(kappa).map_err(input_error)?;
    match majorize(&lm.metric, &t, kappa) {
        Ok(cm) => {
            let cm = canonicalize(&cm);
            if let Some(path) = svg {
                let doc = render_svg(&cm, projection, size).map_err(input_error)?;
                std::fs::write(&path, doc).map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?;
            }
            let output = MapOutput {
                tuple: Some(t.indices().to_vec()),
                map: ComparisonMapJson::from(&cm),
            };
            Ok((json(&output), EXIT_OK))
        }
        Err(e @ MajorizeError::NotQuadruple { witness, margin }) => {
            let output = ErrorOutput {
                error: "not_quadruple",
                message: e.to_string(),
                witness: Some(witness),
                margin: Some(margin),
            };
            Ok((json(&output), EXIT_VIOLATION))
        }
        Err(e @ MajorizeError::NumericalBreakdown { .. }) => Err(Failure {
            code: EXIT_BREAKDOWN,
            message: e.to_string(),
        }),
        Err(e) => Err(input_error(e)),
    }
}

fn gen(model: ModelName, n: usize, kappa: Option<f64>, seed: u64) -> Result<String, Failure> {
    let value = kappa.unwrap_or(match model {
        ModelName::Plane => 0.0,
        ModelName::Sphere => 1.0,
        ModelName::Hyperbolic => -1.0,
    });
    let kappa = kappa_arg(value)?;
    let expected = match model {
        ModelName::Plane => Regime::Plane,
        ModelName::Sphere => Regime::Sphere,
        ModelName::Hyperbolic => Regime::Hyperboloid,
    };
    if kappa.regime() != expected {
        return Err(input_error(format!("curvature {value} does not belong to the {model:?} model")));
    }
    if n == 0 {
        return Err(input_error("--n must be positive"));
    }
    let (m, points) = sample_model_subset(n, kappa, seed);
    Ok(json(&MatrixFile {
        labels: None,
        matrix: m.rows(),
        points: Some(points.iter().map(|p| p.coords()).collect()),
    }))
}

fn verify(input: &std::path::Path, map: &std::path::Path, tuple: Option<&str>) -> Result<(String, i32), Failure> {
    let lm = parse_matrix(input).map_err(input_error)?;
    let text = std::fs::read_to_string(map).map_err(|e| input_error(format!("cannot read {}: {e}", map.display())))?;
    let file: MapOutput = serde_json::from_str(&text).map_err(|e| input_error(format!("malformed map: {e}")))?;
    let (kappa, points) = file.map.model_points().map_err(input_error)?;
    let recorded = file
        .tuple
        .map(|v| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
    let t = parse_tuple(tuple.or(recorded.as_deref()), lm.metric.len()).map_err(input_error)?;
    let check: PolygonCheck = cycl_n_verify(&lm.metric, &t, &points, kappa).map_err(input_error)?;
    let code = if check.report.passed() && check.convexity_ok() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Ok((json(&check), code))
}
