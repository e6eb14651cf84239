//! Command-line surface: `mean`, `perron`, `distance` and `verify`.
//!
//! [`run`] does all the work and returns the exit code with both output
//! streams, so the binary stays a thin shell and tests need no subprocess.
//! Exit codes: 0 success, 1 input error, 2 non-convergence or failed checks.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::{read_matrix_file, to_json, JobResult, MeanJobSpec};
use crate::metrics::{gauge_r, thompson};
use crate::stochastic::{gamma_from_weights_3, profile_unchecked};
use crate::verify::run_checks;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "alm-means", version, about = "Multivariate operator means of positive matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the mean described by a job file (or every job in a directory).
    Mean(MeanArgs),
    /// Weight matrix, Perron vector and primitivity for a set of mean weights.
    Perron(PerronArgs),
    /// Thompson distance and gauge R between two matrices.
    Distance(DistanceArgs),
    /// Run registered property checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct MeanArgs {
    /// JSON job file.
    #[arg(long, required_unless_present = "jobs", conflicts_with = "jobs")]
    pub job: Option<PathBuf>,
    /// Directory of `*.json` jobs, processed concurrently; one JSON line per job.
    #[arg(long)]
    pub jobs: Option<PathBuf>,
    /// Replace the job's matrices, in order, with these files (JSON or whitespace text).
    #[arg(long = "matrix-file")]
    pub matrix_file: Vec<PathBuf>,
    /// Include the sampled iteration trace.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// First rung of the regularization ladder for semidefinite inputs.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Iterate even when a closed form exists.
    #[arg(long = "force-iterate")]
    pub force_iterate: bool,
    /// Run outside the convergence hypotheses.
    #[arg(long = "unsafe-allow")]
    pub unsafe_allow: bool,
}

#[derive(Debug, Args)]
pub struct PerronArgs {
    /// Weight of one two-variable mean; give exactly three.
    #[arg(long = "weight", allow_negative_numbers = true)]
    pub weight: Vec<f64>,
    /// `[r1, r2, r3]` or the weight vectors `[[...], ...]` of n-variable means,
    /// inline or as a file path.
    #[arg(long = "weights-json", conflicts_with = "weight")]
    pub weights_json: Option<String>,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Glob over check names; repeatable.
    #[arg(long, default_value = "*")]
    pub filter: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the trial count of non-exhaustive checks.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Write the full JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn input_error(e: impl std::fmt::Display) -> CliOutput {
        CliOutput {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }

    fn json<T: Serialize>(value: &T) -> CliOutput {
        match to_json(value) {
            Ok(s) => CliOutput {
                code: EXIT_OK,
                stdout: s + "\n",
                stderr: String::new(),
            },
            Err(e) => CliOutput::input_error(e),
        }
    }
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                CliOutput {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutput {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> CliOutput {
    match &cli.command {
        Command::Mean(a) => match &a.jobs {
            Some(dir) => mean_batch(dir, a),
            None => mean_single(a.job.as_deref().expect("clap requires --job"), a),
        },
        Command::Perron(a) => perron(a),
        Command::Distance(a) => distance(a),
        Command::Verify(a) => verify(a),
    }
}

fn load_job(path: &Path, a: &MeanArgs) -> Result<MeanJobSpec> {
    let mut job = MeanJobSpec::read(path)?;
    let cfg = &mut job.config;
    if let Some(t) = a.tol {
        cfg.tol = t;
    }
    if let Some(m) = a.max_iter {
        cfg.max_iter = m;
    }
    if let Some(e) = a.eps {
        cfg.eps_shift = Some(e);
    }
    cfg.force_iterate |= a.force_iterate;
    cfg.unsafe_allow |= a.unsafe_allow;
    Ok(job)
}

/// Runs one job: exit code, result JSON value (if any) and error text (if any).
fn mean_job(path: &Path, a: &MeanArgs) -> (i32, Option<JobResult>, Option<String>) {
    let outcome = load_job(path, a).and_then(|job| {
        if a.matrix_file.is_empty() {
            job.run()
        } else {
            let ops = a
                .matrix_file
                .iter()
                .map(|p| read_matrix_file(p))
                .collect::<Result<Vec<_>>>()?;
            job.run_with(&ops)
        }
    });
    match outcome {
        Ok(o) => (EXIT_OK, Some(JobResult::from_outcome(&o, a.trace)), None),
        Err(Error::NonConverged(o)) => {
            let msg = Error::NonConverged(o.clone()).to_string();
            (EXIT_NUMERIC, Some(JobResult::from_outcome(&o, a.trace)), Some(msg))
        }
        Err(e) => (EXIT_INPUT, None, Some(e.to_string())),
    }
}

fn mean_single(path: &Path, a: &MeanArgs) -> CliOutput {
    let (code, result, err) = mean_job(path, a);
    let mut out = match result {
        Some(r) => CliOutput::json(&r),
        None => CliOutput::default(),
    };
    if out.code == EXIT_OK {
        out.code = code;
    }
    if let Some(e) = err {
        out.stderr.push_str(&format!("error: {e}\n"));
    }
    out
}

fn mean_batch(dir: &Path, a: &MeanArgs) -> CliOutput {
    let mut paths: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => return CliOutput::input_error(format!("{}: {e}", dir.display())),
    };
    if paths.is_empty() {
        return CliOutput::input_error(format!("{}: no *.json jobs", dir.display()));
    }
    paths.sort();
    let results: Vec<_> = paths.par_iter().map(|p| mean_job(p, a)).collect();
    let mut out = CliOutput::default();
    for (path, (code, result, err)) in paths.iter().zip(results) {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
        let mut line = json!({"job": name, "exit": code});
        if let Some(r) = result {
            match serde_json::to_value(&r) {
                Ok(v) => line["result"] = v,
                Err(e) => return CliOutput::input_error(e),
            }
        }
        if let Some(e) = &err {
            line["error"] = Value::String(e.clone());
            out.stderr.push_str(&format!("{}: error: {e}\n", path.display()));
        }
        match to_json(&line) {
            Ok(s) => out.stdout.push_str(&(s + "\n")),
            Err(e) => return CliOutput::input_error(e),
        }
        // input errors dominate numeric ones
        out.code = match (out.code, code) {
            (EXIT_INPUT, _) | (_, EXIT_INPUT) => EXIT_INPUT,
            (x, y) => x.max(y),
        };
    }
    out
}

fn parse_weights(text: &str) -> Result<Value> {
    let trimmed = text.trim_start();
    let body = if trimmed.starts_with('[') {
        text.to_string()
    } else {
        fs::read_to_string(text).map_err(|e| Error::Io(format!("{text}: {e}")))?
    };
    Ok(serde_json::from_str(&body)?)
}

fn perron(a: &PerronArgs) -> CliOutput {
    let profile = match &a.weights_json {
        None => match a.weight.as_slice() {
            &[r1, r2, r3] => gamma_from_weights_3(r1, r2, r3),
            ws => Err(Error::ParameterError(format!(
                "--weight needs exactly three values, got {}",
                ws.len()
            ))),
        },
        Some(text) => parse_weights(text).and_then(|v| {
            if let Ok([r1, r2, r3]) = serde_json::from_value::<[f64; 3]>(v.clone()) {
                gamma_from_weights_3(r1, r2, r3)
            } else {
                profile_unchecked(&serde_json::from_value::<Vec<Vec<f64>>>(v)?)
            }
        }),
    };
    match profile {
        Ok(p) => CliOutput::json(&p),
        Err(e) => CliOutput::input_error(e),
    }
}

fn distance(a: &DistanceArgs) -> CliOutput {
    let result = (|| {
        let x = read_matrix_file(&a.a)?;
        let y = read_matrix_file(&a.b)?;
        let d = thompson(&x, &y)?.value();
        let r = gauge_r(&x, &y)?;
        Ok::<_, Error>(json!({"thompson": d, "gauge_R": r}))
    })();
    match result {
        Ok(v) => CliOutput::json(&v),
        Err(e) => CliOutput::input_error(e),
    }
}

fn verify(a: &VerifyArgs) -> CliOutput {
    let report = match run_checks(&a.filter, a.seed, a.trials) {
        Ok(r) => r,
        Err(e) => return CliOutput::input_error(e),
    };
    let mut out = CliOutput::default();
    for c in &report.checks {
        out.stdout.push_str(&format!(
            "{} {:<40} trials {:>5}  failures {:>4}  worst {:.3e}  slack {:.1e}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.trials,
            c.failures,
            c.worst_excess,
            c.slack
        ));
    }
    let failed = report.failures().count();
    out.stdout.push_str(&format!(
        "{} of {} checks passed (seed {})\n",
        report.checks.len() - failed,
        report.checks.len(),
        a.seed
    ));
    if let Some(path) = &a.report {
        let written = to_json(&report).and_then(|s| {
            fs::write(path, s).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        });
        if let Err(e) = written {
            return CliOutput::input_error(e);
        }
    }
    out.code = if report.passed { EXIT_OK } else { EXIT_NUMERIC };
    out
}
