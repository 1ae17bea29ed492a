//! Command-line front end: argument parsing, file handling and reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::certificates::{self, CertError, FeasibilityClass, LevelSearch, Search};
use crate::duals::{self, DualError, Positivity, SdpInstance};
use crate::io::{self, IoError, LoadedCertificate};
use crate::linalg;
use crate::pencil::LinearPencil;
use crate::poly::Polynomial;
use crate::scalar::{Rational, Scalar};
use crate::sdp::Settings;
use crate::verify::{self, Certificate, VerificationReport, VerifyError};

#[derive(Debug, Parser)]
#[command(name = "lmi-sos", version, about = "Sums of squares certificates for linear matrix inequalities")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Interior point tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Certificate arithmetic: exact rationalizes before writing.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Float)]
    pub mode: Mode,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print the run report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = 200)]
    pub max_iters: usize,
    /// `tau/kappa` ratio beyond which an infeasibility ray is accepted.
    #[arg(long, global = true, default_value_t = 1e6)]
    pub infeas_ratio: f64,
    /// Largest denominator used when rationalizing.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub denom_bound: u64,
    /// Include per-phase timings in the report (makes output run-dependent).
    #[arg(long, global = true)]
    pub timings: bool,
}

impl GlobalArgs {
    pub fn settings(&self) -> Settings {
        Settings {
            tol: self.tol,
            max_iters: self.max_iters,
            infeas_ratio: self.infeas_ratio,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strongly/weakly feasible or infeasible, with a witness or certificate.
    Classify {
        pencil: PathBuf,
        /// Output file for the certificate or witness
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Searches -1 in the truncated quadratic module level by level.
    CertifyInfeasible {
        pencil: PathBuf,
        #[arg(long, conflicts_with = "auto_bound")]
        max_level: Option<usize>,
        /// Search up to the level bound 2^min(size-1, nvars) - 1 (the default).
        #[arg(long)]
        auto_bound: bool,
        /// Output file for the certificate or witness
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Searches a linear f with -f^2 in the module (spectrahedron inside f = 0).
    CertifyLowdim {
        pencil: PathBuf,
        /// Output file for the certificate or witness
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Searches N +- x_i in the module (bounded spectrahedron).
    CertifyBounded {
        pencil: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_level: usize,
        /// Output file for the certificate or witness
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Primal, standard dual and sums of squares dual values for a linear objective.
    DualSos {
        pencil: PathBuf,
        #[arg(long)]
        objective: String,
        /// Output file for the certificate or witness
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a certificate against a pencil; exit status 0 on pass, 1 on fail.
    Verify { pencil: PathBuf, certificate: PathBuf },
    /// Nonnegativity of a linear functional on the PSD matrices of a span.
    Functional {
        /// JSON file `{"size": a, "matrices": [A_1, ...]}`.
        #[arg(long)]
        basis: PathBuf,
        /// Comma-separated values f(A_1), f(A_2), ...
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Output file for the certificate or witness
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Converts an SDPA sparse file to pencil JSON and prints its objective.
    ImportSdpa {
        file: PathBuf,
        /// Output file for the pencil JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::CertifyInfeasible { .. } => "certify-infeasible",
            Command::CertifyLowdim { .. } => "certify-lowdim",
            Command::CertifyBounded { .. } => "certify-bounded",
            Command::DualSos { .. } => "dual-sos",
            Command::Verify { .. } => "verify",
            Command::Functional { .. } => "functional",
            Command::ImportSdpa { .. } => "import-sdpa",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: String, source: IoError },
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Machine-readable record of one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, u128>>,
    pub status: String,
    pub seed: u64,
    pub result: Value,
}

/// What `main` prints and the process exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub lines: Vec<String>,
    pub exit_code: i32,
}

impl Outcome {
    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            io::to_json_text(&serde_json::to_value(&self.report).unwrap_or_default()).trim_end().to_string()
        } else {
            self.lines.join("\n")
        }
    }
}

struct Run<'a> {
    global: &'a GlobalArgs,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    timings: BTreeMap<String, u128>,
    lines: Vec<String>,
}

impl<'a> Run<'a> {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        })?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: format!("{:x}", Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|e| CliError::File {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })
    }

    fn pencil(&mut self, path: &Path) -> Result<LinearPencil<Rational>, CliError> {
        let text = self.read(path)?;
        io::read_pencil(&text).map_err(|source| CliError::Format {
            path: path.display().to_string(),
            source,
        })
    }

    fn write(&mut self, path: &Path, value: &Value) -> Result<(), CliError> {
        let text = io::to_json_text(value);
        fs::write(path, text).map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        })?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn timed<R>(&mut self, phase: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        let start = Instant::now();
        let r = f(self);
        *self.timings.entry(phase.to_string()).or_insert(0) += start.elapsed().as_millis();
        r
    }

    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    /// Re-verifies `cert` (rationalized first in exact mode) and writes it when it passes.
    fn emit(
        &mut self,
        pencil: &LinearPencil<Rational>,
        cert: Certificate<f64>,
        out: Option<&Path>,
    ) -> Result<Value, CliError> {
        let (json, report) = match self.global.mode {
            Mode::Float => {
                let report = self.timed("verify", |_| verify::verify_certificate(&pencil.to_float(), &cert))?;
                (io::certificate_to_json(&cert, pencil.nvars(), pencil.size()), report)
            }
            Mode::Exact => {
                let denom = self.global.denom_bound;
                match self.timed("rationalize", |_| verify::rationalize(pencil, &cert, denom)) {
                    Ok(exact) => {
                        let report = self.timed("verify", |_| verify::verify_certificate(pencil, &exact))?;
                        (io::certificate_to_json(&exact, pencil.nvars(), pencil.size()), report)
                    }
                    Err(e) => {
                        self.say(format!("certificate not written: rationalization failed ({e})"));
                        return Ok(json!({ "written": false, "reason": e.to_string() }));
                    }
                }
            }
        };
        let summary = report_json(&report);
        if !report.pass {
            self.say("certificate not written: re-verification failed");
            return Ok(json!({ "written": false, "verification": summary }));
        }
        if let Some(path) = out {
            self.timed("write", |r| r.write(path, &json))?;
            self.say(format!("certificate written to {}", path.display()));
        }
        Ok(json!({ "written": out.is_some(), "verification": summary }))
    }
}

fn report_json(r: &VerificationReport) -> Value {
    json!({
        "type": r.cert_type,
        "mode": r.mode,
        "pass": r.pass,
        "max_residual": r.max_residual(),
        "min_margin": r.min_margin(),
    })
}

fn report_lines(r: &VerificationReport) -> Vec<String> {
    let mut out = vec![format!("type: {} ({})", r.cert_type, r.mode)];
    for (label, v) in &r.identity_residuals {
        out.push(format!("identity {label}: residual {v:.3e}"));
    }
    for (label, v) in &r.psd_margins {
        out.push(format!("psd {label}: margin {v:.3e}"));
    }
    out.push(if r.pass { "pass".into() } else { "fail".into() });
    out
}

fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| f64::parse_scalar(t).map_err(|e| CliError::Usage(format!("--values: {e}"))))
        .collect()
}

fn read_basis(run: &mut Run<'_>, path: &Path) -> Result<Vec<DMatrix<f64>>, CliError> {
    let text = run.read(path)?;
    let fail = |source| CliError::Format {
        path: path.display().to_string(),
        source,
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| fail(e.into()))?;
    let Some(mats) = v.get("matrices").and_then(Value::as_array) else {
        return Err(fail(IoError::Schema {
            path: "$.matrices".into(),
            message: "expected an array of matrices".into(),
        }));
    };
    mats.iter()
        .enumerate()
        .map(|(k, m)| io::matrix_from_json::<f64>(m, &format!("$.matrices[{k}]")).map_err(fail))
        .collect()
}

fn status_of<C>(s: &Search<C>) -> &'static str {
    match s {
        Search::Found(_) => "found",
        Search::NotFound { .. } => "not-found",
    }
}

/// Runs one command. Errors are input or solver failures; negative answers are
/// reported through [`Outcome::exit_code`].
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let settings = cli.global.settings();
    let mut run = Run {
        global: &cli.global,
        inputs: Vec::new(),
        outputs: Vec::new(),
        timings: BTreeMap::new(),
        lines: Vec::new(),
    };
    let (status, result, exit_code): (String, Value, i32) = match &cli.command {
        Command::Classify { pencil, out } => {
            let exact = run.timed("parse", |r| r.pencil(pencil))?;
            let a = exact.to_float();
            let class = run.timed("solve", |_| certificates::classify(&a, &settings))?;
            run.say(class.describe());
            let tag = class.tag();
            let mut result = json!({ "class": tag, "level": class.level() });
            match class {
                FeasibilityClass::WeaklyInfeasible(c) | FeasibilityClass::StronglyInfeasible(c) => {
                    result["certificate"] = run.emit(&exact, Certificate::Infeasibility(c), out.as_deref())?;
                }
                FeasibilityClass::StronglyFeasible { witness, .. } | FeasibilityClass::WeaklyFeasible { witness, .. } => {
                    // A witness is re-checked by evaluating the pencil.
                    let value = a.evaluate(&witness).map_err(|e| CliError::Usage(e.to_string()))?;
                    let min_eig = linalg::min_eigenvalue(&value);
                    result["witness"] = json!(witness);
                    result["min_eigenvalue"] = json!(min_eig);
                    if let Some(path) = out {
                        if min_eig >= -verify::FLOAT_TOL {
                            let point = json!({ "type": "feasible-point", "x": witness, "min_eigenvalue": min_eig });
                            run.write(path, &point)?;
                            run.say(format!("witness written to {}", path.display()));
                        } else {
                            run.say("witness not written: not PSD within tolerance");
                        }
                    }
                }
                FeasibilityClass::Unknown { .. } => {}
            }
            (tag.to_string(), result, 0)
        }
        Command::CertifyInfeasible {
            pencil,
            max_level,
            out,
            ..
        } => {
            let exact = run.timed("parse", |r| r.pencil(pencil))?;
            let a = exact.to_float();
            let search = run.timed("solve", |_| certificates::infeasibility_level(&a, *max_level, &settings))?;
            match search {
                LevelSearch::Found(c) => {
                    run.say(format!("infeasible, level {}", c.level));
                    let level = c.level;
                    let cert = run.emit(&exact, Certificate::Infeasibility(c), out.as_deref())?;
                    ("found".into(), json!({ "level": level, "certificate": cert }), 0)
                }
                LevelSearch::NoneUpToBound { bound, residuals } => {
                    run.say(format!("no certificate up to level {bound}"));
                    ("not-found".into(), json!({ "bound": bound, "residuals": residuals }), 1)
                }
            }
        }
        Command::CertifyLowdim { pencil, out } => {
            let exact = run.timed("parse", |r| r.pencil(pencil))?;
            let search = run.timed("solve", |_| certificates::lowdim_certificate(&exact.to_float(), &settings))?;
            let status = status_of(&search).to_string();
            match search {
                Search::Found(c) => {
                    run.say(format!("f = {}", c.f));
                    let f = c.f.to_string();
                    let cert = run.emit(&exact, Certificate::LowDim(c), out.as_deref())?;
                    (status, json!({ "f": f, "certificate": cert }), 0)
                }
                Search::NotFound { residual } => {
                    run.say("no low-dimensionality certificate found");
                    (status, json!({ "residual": residual }), 1)
                }
            }
        }
        Command::CertifyBounded { pencil, max_level, out } => {
            let exact = run.timed("parse", |r| r.pencil(pencil))?;
            let search = run.timed("solve", |_| {
                certificates::boundedness_certificate(&exact.to_float(), *max_level, &settings)
            })?;
            let status = status_of(&search).to_string();
            match search {
                Search::Found(c) => {
                    run.say(format!("bounded: N = {}, level {}", duals::format_value(c.bound), c.level));
                    let (bound, level) = (c.bound, c.level);
                    let cert = run.emit(&exact, Certificate::Boundedness(c), out.as_deref())?;
                    (status, json!({ "N": bound, "level": level, "certificate": cert }), 0)
                }
                Search::NotFound { residual } => {
                    run.say(format!("no boundedness certificate up to level {max_level}"));
                    (status, json!({ "residual": residual }), 1)
                }
            }
        }
        Command::DualSos { pencil, objective, out } => {
            let exact = run.timed("parse", |r| r.pencil(pencil))?;
            let ell: Polynomial<Rational> = Polynomial::parse(objective, exact.nvars())
                .map_err(|e| CliError::Usage(format!("--objective: {e}")))?;
            let inst = SdpInstance::new(exact.to_float(), ell.to_float())?;
            let g = run.timed("solve", |_| duals::gap_report(&inst, &settings))?;
            run.say(format!("P*={} D*={} Dsos*={}", g.primal.value, g.dual.value, g.sos_dual.value));
            let yes = |b: bool| if b { "yes" } else { "no" };
            run.say(format!(
                "attained: P={} D={} Dsos={}",
                yes(g.primal.attained),
                yes(g.dual.attained),
                yes(g.sos_dual.attained)
            ));
            let mut result = json!({
                "P": g.primal.value.to_string(),
                "D": g.dual.value.to_string(),
                "Dsos": g.sos_dual.value.to_string(),
                "attained": { "P": g.primal.attained, "D": g.dual.attained, "Dsos": g.sos_dual.attained },
                "status": { "P": g.primal.status.label(), "D": g.dual.status.label(), "Dsos": g.sos_dual.status.label() },
            });
            if let Some(point) = g.extracted {
                result["certificate"] = run.emit(&exact, Certificate::SosDual(point), out.as_deref())?;
            }
            ("solved".into(), result, 0)
        }
        Command::Verify { pencil, certificate } => {
            let exact = run.timed("parse", |r| r.pencil(pencil))?;
            let text = run.read(certificate)?;
            let loaded = io::read_certificate(&text).map_err(|source| CliError::Format {
                path: certificate.display().to_string(),
                source,
            })?;
            let report = run.timed("verify", |_| match &loaded {
                LoadedCertificate::Exact(c) => verify::verify_certificate(&exact, c),
                LoadedCertificate::Float(c) => verify::verify_certificate(&exact.to_float(), c),
            });
            match report {
                Ok(report) => {
                    for line in report_lines(&report) {
                        run.say(line);
                    }
                    let code = if report.pass { 0 } else { 1 };
                    let status = if report.pass { "pass" } else { "fail" };
                    (status.into(), report_json(&report), code)
                }
                Err(e) => {
                    // A certificate for a different pencil shape fails rather than errors.
                    run.say(format!("fail: {e}"));
                    ("fail".into(), json!({ "error": e.to_string() }), 1)
                }
            }
        }
        Command::Functional { basis, values, out } => {
            let mats = run.timed("parse", |r| read_basis(r, basis))?;
            let vals = parse_values(values)?;
            let answer = run.timed("solve", |_| duals::functional_positivity(&mats, &vals, &settings))?;
            match answer {
                Positivity::Positive(point) => {
                    run.say("positive");
                    if let Some(path) = out {
                        let cert = Certificate::SosDual(*point);
                        let json = io::certificate_to_json(&cert, mats.len(), mats[0].nrows());
                        run.write(path, &json)?;
                        run.say(format!("certificate written to {}", path.display()));
                    }
                    ("positive".into(), json!({}), 0)
                }
                Positivity::NotPositive { x, value, .. } => {
                    run.say(format!("not positive: f(A(x)) = {} at x = {:?}", duals::format_value(value), x));
                    ("not-positive".into(), json!({ "x": x, "value": value }), 1)
                }
                Positivity::Unknown => {
                    run.say("unknown");
                    ("unknown".into(), json!({}), 1)
                }
            }
        }
        Command::ImportSdpa { file, out } => {
            let text = run.read(file)?;
            let p = io::read_sdpa(&text).map_err(|source| CliError::Format {
                path: file.display().to_string(),
                source,
            })?;
            let pencil_json = io::pencil_to_json(&p.pencil);
            match out {
                Some(path) => {
                    run.write(path, &pencil_json)?;
                    run.say(format!("pencil written to {}", path.display()));
                }
                None => run.say(io::to_json_text(&pencil_json).trim_end()),
            }
            run.say(format!("objective: {}", p.objective));
            (
                "imported".into(),
                json!({ "nvars": p.pencil.nvars(), "size": p.pencil.size(), "objective": p.objective.to_string() }),
                0,
            )
        }
    };
    let report = RunReport {
        command: cli.command.name().to_string(),
        inputs: run.inputs,
        outputs: run.outputs,
        timings: cli.global.timings.then_some(run.timings.clone()),
        status,
        seed: cli.global.seed,
        result,
    };
    let mut lines = run.lines;
    if cli.global.timings {
        let parts: Vec<String> = run.timings.iter().map(|(k, v)| format!("{k} {v} ms")).collect();
        lines.push(format!("timings: {}", parts.join(", ")));
    }
    Ok(Outcome {
        report,
        lines,
        exit_code,
    })
}
