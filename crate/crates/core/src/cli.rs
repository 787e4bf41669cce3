//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 verification
//! failure, 3 unroutable request.

use std::ffi::OsString;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bits::{BitVector, MAX_DIM};
use crate::cayley::{
    adjacency_to_lists, build_cayley_graph, build_generating_set, build_path_graph, check_columnar,
    check_columnar_lists, CayleyGraph, ColumnarReport, CoordPerm,
};
use crate::dynamics::{dense_eigenvalues, fidelity_series, DEFAULT_SAMPLES};
use crate::error::{check_range, Error};
use crate::formats::{fidelity_csv, format_real, graph_json, route_json, spectrum_csv, spectrum_json, write_atomic};
use crate::routing::{execute_route, extract_permutation, plan_route, predicted_permutation};
use crate::spectral::{rational_ratio_check, spectral_table_for, RATIO_TOLERANCE};

/// Fig. 3 preset grid: 513 points put tau = pi/2 exactly on sample 256.
pub const SWEEP_SAMPLES: usize = 513;
pub const SWEEP_DIM: usize = 6;

const LABEL_HELP: &str = "Node labels on the command line are 1-based (label = index + 1, with x_1 \
the most significant bit). JSON payloads use 0-based node indices.\n\nExit codes: 0 success, \
1 usage/validation error, 2 verification FAIL, 3 unroutable.";

#[derive(Parser, Debug)]
#[command(name = "hyperroute", version, about = "Dressed-hypercube spin networks: spectra, dynamics and perfect routing", after_help = LABEL_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,
    #[command(flatten)]
    pub args: Args,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    /// Emit the graph as JSON.
    Gen,
    /// Emit the exact spectrum (sign vector, eigenvalue, parity).
    Spectrum,
    /// Emit return/transfer probabilities over a time grid.
    Evolve,
    /// Compare the predicted and the numerically extracted permutation.
    Verify,
    /// Plan and execute a route between two nodes.
    Route,
    /// Write the six Z_2^6(l) fidelity series.
    Fig3,
    /// Columnar and rational-ratio report.
    Check,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Args {
    /// Hypercube dimension d (1..=16).
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Dressing level l (1..=d).
    #[arg(long, global = true, default_value_t = 1)]
    pub l: usize,
    /// Source node label (1-based).
    #[arg(long, global = true, default_value_t = 1)]
    pub source: usize,
    /// Target node label (1-based). Defaults to the predicted image of the source.
    #[arg(long, global = true)]
    pub target: Option<usize>,
    /// End of the time grid.
    #[arg(long = "tau-max", global = true, default_value_t = PI)]
    pub tau_max: f64,
    /// Evolution time for `verify`.
    #[arg(long, global = true, default_value_t = FRAC_PI_2)]
    pub tau: f64,
    /// Grid points, both ends included (default 512; 513 for fig3).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Coordinate permutation, comma separated images of 1..d.
    #[arg(long, global = true)]
    pub perm: Option<String>,
    /// XOR translation as a bit string (labelling only).
    #[arg(long, global = true)]
    pub translation: Option<String>,
    /// Output file (directory for fig3). Defaults to stdout (./fig3 for fig3).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Tolerance for `verify`.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// `check` a homogeneous path of this many nodes instead of a Cayley graph.
    #[arg(long, global = true)]
    pub path: Option<usize>,
}

/// A parsed and validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub d: usize,
    pub l: usize,
    pub perm: CoordPerm,
    pub translation: BitVector,
    /// 0-based.
    pub source: usize,
    /// 0-based.
    pub target: Option<usize>,
    pub tau_max: f64,
    pub tau: f64,
    pub samples: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub tolerance: f64,
    pub path_len: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Library(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let a = cli.args;
        let command = cli.command;
        let path_only = command == CommandKind::Check && a.path.is_some();
        let d = match (a.d, command) {
            (Some(d), _) => d,
            (None, CommandKind::Fig3) => SWEEP_DIM,
            (None, _) if path_only => 1,
            (None, _) => return Err(CliError::Usage("--d is required".into())),
        };
        check_range("d", d, 1, MAX_DIM)?;
        if command != CommandKind::Fig3 {
            check_range("l", a.l, 1, d)?;
        }
        let perm = match &a.perm {
            Some(s) => CoordPerm::parse(s)?,
            None => CoordPerm::identity(d),
        };
        if perm.dim() != d {
            return Err(Error::InvalidPermutation {
                perm: perm.images().to_vec(),
                d,
            }
            .into());
        }
        let translation = match &a.translation {
            Some(s) => {
                let t: BitVector = s.parse()?;
                if t.dim() != d {
                    return Err(CliError::Usage(format!("translation '{s}' must have {d} bits")));
                }
                t
            }
            None => BitVector::zero(d)?,
        };
        let node_cap = match a.path {
            Some(n) if path_only => n,
            _ => 1usize << d,
        };
        check_range("source label", a.source, 1, node_cap)?;
        if let Some(t) = a.target {
            check_range("target label", t, 1, node_cap)?;
        }
        if let Some(n) = a.path {
            if n < 2 {
                return Err(CliError::Usage("--path needs at least 2 nodes".into()));
            }
        }
        let samples = a.samples.unwrap_or(if command == CommandKind::Fig3 {
            SWEEP_SAMPLES
        } else {
            DEFAULT_SAMPLES
        });
        if samples < 2 {
            return Err(CliError::Usage("--samples must be at least 2".into()));
        }
        if !a.tau_max.is_finite() || a.tau_max < 0.0 {
            return Err(CliError::Usage("--tau-max must be finite and non-negative".into()));
        }
        if !a.tau.is_finite() || a.tau < 0.0 {
            return Err(CliError::Usage("--tau must be finite and non-negative".into()));
        }
        if !(a.tolerance > 0.0 && a.tolerance <= 1e-3) {
            return Err(CliError::Usage("--tolerance must lie in (0, 1e-3]".into()));
        }
        let format = resolve_format(command, a.format)?;
        Ok(Self {
            command,
            d,
            l: a.l,
            perm,
            translation,
            source: a.source - 1,
            target: a.target.map(|t| t - 1),
            tau_max: a.tau_max,
            tau: a.tau,
            samples,
            output_path: a.out,
            format,
            tolerance: a.tolerance,
            path_len: if path_only { a.path } else { None },
        })
    }

    fn graph(&self) -> Result<CayleyGraph, Error> {
        let gen = build_generating_set(self.d, self.l)?;
        build_cayley_graph(&gen, &self.perm, self.translation)
    }
}

fn resolve_format(command: CommandKind, requested: Option<Format>) -> Result<Format, CliError> {
    let allowed: &[Format] = match command {
        CommandKind::Gen | CommandKind::Route => &[Format::Json],
        CommandKind::Spectrum => &[Format::Csv, Format::Json],
        CommandKind::Evolve | CommandKind::Fig3 => &[Format::Csv],
        // text reports; the flag is not meaningful
        CommandKind::Verify | CommandKind::Check => &[],
    };
    match requested {
        None => Ok(allowed.first().copied().unwrap_or(Format::Csv)),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(CliError::Usage(format!("--format {f:?} is not supported by {command:?}"))),
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Usage = 1,
    VerificationFailed = 2,
    Unroutable = 3,
}

fn emit(config: &RunConfig, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &config.output_path {
        Some(p) => write_file(p, text),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io {
            path: "<stdout>".into(),
            source: e,
        }),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    write_atomic(path, text.as_bytes()).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn out_line(stdout: &mut dyn Write, line: String) -> Result<(), CliError> {
    writeln!(stdout, "{line}").map_err(|e| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    })
}

pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<Status, CliError> {
    match config.command {
        CommandKind::Gen => {
            emit(config, stdout, &graph_json(&config.graph()?))?;
        }
        CommandKind::Spectrum => {
            let table = spectral_table_for(&config.graph()?)?;
            let text = match config.format {
                Format::Json => spectrum_json(&table),
                Format::Csv => spectrum_csv(&table),
            };
            emit(config, stdout, &text)?;
        }
        CommandKind::Evolve => {
            let graph = config.graph()?;
            let target = match config.target {
                Some(t) => t,
                None => predicted_permutation(config.d, config.l, &config.perm)?.apply(config.source),
            };
            let series = fidelity_series(&graph, config.source, target, config.tau_max, config.samples)?;
            emit(config, stdout, &fidelity_csv(&series))?;
        }
        CommandKind::Verify => return verify(config, stdout),
        CommandKind::Route => {
            let target = config
                .target
                .ok_or_else(|| CliError::Usage("route needs --target".into()))?;
            let plan = match plan_route(config.d, config.source, target) {
                Ok(p) => p,
                Err(e @ Error::Unroutable { .. }) => {
                    out_line(stdout, format!("UNROUTABLE: {e}"))?;
                    return Ok(Status::Unroutable);
                }
                Err(e) => return Err(e.into()),
            };
            let outcome = execute_route(&plan)?;
            emit(config, stdout, &route_json(&plan, outcome.fidelity))?;
        }
        CommandKind::Fig3 => {
            let dir = config.output_path.clone().unwrap_or_else(|| PathBuf::from("fig3"));
            std::fs::create_dir_all(&dir).map_err(|e| CliError::Io {
                path: dir.display().to_string(),
                source: e,
            })?;
            for l in 1..=config.d {
                let gen = build_generating_set(config.d, l)?;
                let graph = build_cayley_graph(&gen, &config.perm, config.translation)?;
                let target = predicted_permutation(config.d, l, &config.perm)?.apply(config.source);
                let series = fidelity_series(&graph, config.source, target, config.tau_max, config.samples)?;
                let path = dir.join(format!("fig3_d{}_l{l}.csv", config.d));
                write_file(&path, &fidelity_csv(&series))?;
                out_line(
                    stdout,
                    format!("l={l} source={} target={} -> {}", config.source + 1, target + 1, path.display()),
                )?;
            }
        }
        CommandKind::Check => check(config, stdout)?,
    }
    Ok(Status::Success)
}

fn verify(config: &RunConfig, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let graph = config.graph()?;
    let predicted = predicted_permutation(config.d, config.l, &config.perm)?;
    let k = |k: Option<i64>| k.map_or("none".to_string(), |k| k.to_string());
    out_line(
        stdout,
        format!("graph: Z_2^{}({}) coord_perm {}", config.d, config.l, config.perm),
    )?;
    out_line(stdout, format!("tau: {}", format_real(config.tau)))?;
    out_line(
        stdout,
        format!("predicted: {} k={}", predicted.cycle_string(), k(predicted.global_phase_k)),
    )?;
    let pass = match extract_permutation(&graph, config.tau, config.tolerance) {
        Ok(e) => {
            out_line(
                stdout,
                format!(
                    "extracted: {} k={} max_leak={:.3e}",
                    e.permutation.cycle_string(),
                    k(e.permutation.global_phase_k),
                    e.max_leak
                ),
            )?;
            e.permutation == predicted
        }
        Err(e @ (Error::NotAPermutation { .. } | Error::PhaseMismatch { .. })) => {
            out_line(stdout, format!("extracted: none ({e})"))?;
            false
        }
        Err(e) => return Err(e.into()),
    };
    out_line(stdout, format!("result: {}", if pass { "PASS" } else { "FAIL" }))?;
    Ok(if pass {
        Status::Success
    } else {
        Status::VerificationFailed
    })
}

fn columnar_lines(report: &ColumnarReport) -> Vec<String> {
    let sizes: Vec<String> = report.column_sizes().iter().map(|s| s.to_string()).collect();
    vec![
        format!("columnar: {}", if report.is_columnar { "yes" } else { "no" }),
        format!("column_sizes: {}", sizes.join(",")),
        format!(
            "violation: {}",
            report.violation.as_ref().map_or("none".to_string(), |v| v.to_string())
        ),
    ]
}

fn check(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (header, report, eigenvalues) = match config.path_len {
        Some(n) => {
            let a = build_path_graph(n)?;
            let report = check_columnar_lists(&adjacency_to_lists(&a), config.source)?;
            (format!("graph: path({n})"), report, dense_eigenvalues(&a)?)
        }
        None => {
            let graph = config.graph()?;
            let table = spectral_table_for(&graph)?;
            let report = check_columnar(&graph, config.source)?;
            let ev = table.eigenvalues().iter().map(|&e| e as f64).collect();
            (
                format!("graph: Z_2^{}({}) coord_perm {}", config.d, config.l, config.perm),
                report,
                ev,
            )
        }
    };
    let mut lines = vec![header, format!("source: {}", config.source + 1)];
    lines.extend(columnar_lines(&report));
    let rational = rational_ratio_check(&eigenvalues, RATIO_TOLERANCE);
    lines.push(format!("rational_ratios: {}", if rational { "yes" } else { "no" }));
    let mut text = lines.join("\n");
    text.push('\n');
    emit(config, stdout, &text)
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Status::Usage as i32 } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg, stdout));
    match result {
        Ok(status) => status as i32,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            Status::Usage as i32
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("hyperroute").chain(args.iter().copied());
        let code = main_with_args(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn verify_d3_l2() {
        let (code, out, _) = run_args(&["verify", "--d", "3", "--l", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("predicted: (1,2)(3,4)(5,6)(7,8) k=0"));
        assert!(out.contains("extracted: (1,2)(3,4)(5,6)(7,8) k=0"));
        assert!(out.ends_with("result: PASS\n"));
    }

    #[test]
    fn verify_negative_control() {
        let tau = (PI / 4.0).to_string();
        let (code, out, _) = run_args(&["verify", "--d", "3", "--l", "1", "--tau", &tau]);
        assert_eq!(code, 2);
        assert!(out.contains("result: FAIL"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["gen"]).0, 1);
        assert_eq!(run_args(&["gen", "--d", "3", "--l", "4"]).0, 1);
        assert_eq!(run_args(&["gen", "--d", "17"]).0, 1);
        assert_eq!(run_args(&["gen", "--d", "3", "--perm", "1,1,2"]).0, 1);
        assert_eq!(run_args(&["route", "--d", "3", "--source", "9", "--target", "1"]).0, 1);
        assert_eq!(run_args(&["spectrum", "--d", "3", "--format", "json"]).0, 0);
        assert_eq!(run_args(&["gen", "--d", "3", "--format", "csv"]).0, 1);
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn route_exit_codes() {
        let (code, out, _) = run_args(&["route", "--d", "3", "--source", "1", "--target", "8"]);
        assert_eq!(code, 0);
        let doc: crate::formats::RouteDocument = serde_json::from_str(&out).unwrap();
        assert_eq!(doc.steps.len(), 1);
        assert_eq!(doc.steps[0].l, 1);
        assert_eq!((doc.source, doc.target), (0, 7));
        assert!((doc.duration - FRAC_PI_2).abs() < 1e-15);
        assert!((doc.fidelity - 1.0).abs() < 1e-12);
        let (code, out, _) = run_args(&["route", "--d", "2", "--source", "1", "--target", "2"]);
        assert_eq!(code, 3);
        assert!(out.starts_with("UNROUTABLE"));
    }

    #[test]
    fn check_reports() {
        let (code, out, _) = run_args(&["check", "--d", "4"]);
        assert_eq!(code, 0);
        assert!(out.contains("columnar: yes\ncolumn_sizes: 1,4,6,4,1"));
        assert!(out.contains("rational_ratios: yes"));
        let (_, out, _) = run_args(&["check", "--d", "3", "--l", "2"]);
        assert!(out.contains("columnar: no"));
        let (_, out, _) = run_args(&["check", "--path", "4"]);
        assert!(out.contains("rational_ratios: no"));
        let (_, out, _) = run_args(&["check", "--path", "3"]);
        assert!(out.contains("rational_ratios: yes"));
    }
}
