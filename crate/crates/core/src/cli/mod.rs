//! The `awq` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 numerical
//! failure.

mod export;
mod io;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::awoperator::{dq_inverse_integral, dq_inverse_spectral, dq_spectral};
use crate::chebyshev::{analyze_u_periodic, ChebyshevSeriesT, ChebyshevSeriesU};
use crate::conformal::{ellipse_from_b, riemann_map, riemann_map_derivative};
use crate::qhermite::{qhermite_direct, qhermite_eval};
use crate::quadrature::{periodic_trapezoid, SampledFunction};
use crate::theta::{theta4, theta4_logderiv, ThetaMethod};
use crate::{Error, QParameter, Tolerance};

pub use export::Target;
pub use io::{Format, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Library(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "awq", version, about = "Askey-Wilson operator, its inverse, and companions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// The base q in (0, 1); the nome for theta-eval.
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Degree / points per axis, depending on the command.
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    /// Quadrature size.
    #[arg(long = "M", global = true)]
    pub m: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Spectral)]
    pub mode: Mode,
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long = "rel-eps", global = true)]
    pub rel_eps: Option<f64>,
    #[arg(long = "max-terms", global = true)]
    pub max_terms: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Spectral,
    Integral,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ϑ₄ and ϑ₄'/ϑ₄ (both evaluation paths) at nome q.
    ThetaEval {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<f64>,
    },
    /// D_q on T-coefficients; writes U-coefficients with the unused slot 0.
    DqApply,
    /// D_q^{-1} on U-coefficients (spectral) or on trapezoid samples (integral).
    DqInvert,
    /// H_n(x|q), n = 0..=N, by recurrence and by the defining sum.
    Hermite {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
    },
    /// The ellipse Riemann map f(z, ζ) and f'(z, ζ).
    Conformal {
        #[arg(long, default_value_t = 0.75)]
        b: f64,
        /// "re,im" or "re"
        #[arg(long, default_value = "0.2", allow_hyphen_values = true)]
        zeta: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Run the named verification suites; one PASS/FAIL line each.
    Verify {
        #[arg(long)]
        only: Option<String>,
        /// Replace every suite's tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Write a plot grid.
    ExportGrid {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long, default_value_t = 0.75)]
        b: f64,
        #[arg(long, default_value = "0.2", allow_hyphen_values = true)]
        zeta: String,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("awq: {e}");
            e.exit_code()
        }
    }
}

fn tolerance(common: &Common) -> Result<Tolerance, CliError> {
    let d = Tolerance::default();
    Ok(Tolerance::new(
        common.rel_eps.unwrap_or(d.rel_eps),
        common.max_terms.unwrap_or(d.max_terms),
    )?)
}

fn require_q(common: &Common, command: &str) -> Result<QParameter, CliError> {
    let q = common
        .q
        .ok_or_else(|| CliError::Input(format!("{command} requires --q")))?;
    Ok(QParameter::new(q)?)
}

fn require_input(common: &Common, command: &str) -> Result<PathBuf, CliError> {
    common
        .input
        .clone()
        .ok_or_else(|| CliError::Input(format!("{command} requires --input")))
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| CliError::Input(format!("cannot parse {t:?} in complex value {s:?}")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(CliError::Input(format!("complex value {s:?} must be \"re\" or \"re,im\""))),
    }
}

fn meta(command: &str, q: Option<QParameter>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    if let Some(q) = q {
        m.insert("q".into(), json!(q.value()));
    }
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let common = &cli.common;
    let tol = tolerance(common)?;
    match &cli.command {
        Command::ThetaEval { z } => {
            let q = require_q(common, "theta-eval")?;
            let mut t = Table::new(
                vec![("z".into(), z.clone())],
                &["theta4", "logderiv_fourier", "logderiv_defining"],
            );
            for &zi in z {
                t.rows.push(vec![
                    theta4(zi, q, tol)?.value,
                    theta4_logderiv(zi, q, tol, ThetaMethod::FourierSeries)?.value,
                    theta4_logderiv(zi, q, tol, ThetaMethod::DefiningSeries)?.value,
                ]);
            }
            t.meta = meta("theta-eval", Some(q));
            io::emit(&t.render(common.format), common.output.as_ref())?;
        }
        Command::DqApply => {
            let q = require_q(common, "dq-apply")?;
            if common.mode != Mode::Spectral {
                return Err(CliError::Input("dq-apply acts on T-coefficients; use --mode spectral".into()));
            }
            let path = require_input(common, "dq-apply")?;
            let f = ChebyshevSeriesT::new(io::parse_coefficients(&io::read_text(&path)?, &path)?);
            let g = dq_spectral(&f, q);
            let text = io::render_coefficients(g.coeffs(), common.format, meta("dq-apply", Some(q)));
            io::emit(&text, common.output.as_ref())?;
        }
        Command::DqInvert => {
            let q = require_q(common, "dq-invert")?;
            let path = require_input(common, "dq-invert")?;
            let text = io::read_text(&path)?;
            match common.mode {
                Mode::Spectral => {
                    let coeffs = io::parse_coefficients(&text, &path)?;
                    let g = ChebyshevSeriesU::new(coeffs)
                        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    let f = dq_inverse_spectral(&g, q);
                    let out = io::render_coefficients(f.coeffs(), common.format, meta("dq-invert", Some(q)));
                    io::emit(&out, common.output.as_ref())?;
                }
                Mode::Integral => invert_integral(common, q, tol, &path, &text)?,
            }
        }
        Command::Hermite { x } => {
            let q = require_q(common, "hermite")?;
            let n_max = common.n.unwrap_or(6);
            let degrees: Vec<f64> = (0..=n_max).map(|n| n as f64).collect();
            let mut t = Table::new(vec![("n".into(), degrees), ("x".into(), x.clone())], &["recurrence", "direct"]);
            for n in 0..=n_max {
                for &xi in x {
                    if !(-1.0..=1.0).contains(&xi) {
                        return Err(CliError::Input(format!("x = {xi} is outside [-1, 1]")));
                    }
                    t.rows.push(vec![qhermite_eval(n, xi, q), qhermite_direct(n, xi.acos(), q)]);
                }
            }
            t.meta = meta("hermite", Some(q));
            io::emit(&t.render(common.format), common.output.as_ref())?;
        }
        Command::Conformal { b, zeta, z } => {
            let geom = ellipse_from_b(*b)?;
            let (zeta, z) = (parse_complex(zeta)?, parse_complex(z)?);
            let f = riemann_map(z, zeta, &geom, tol)?;
            let d = riemann_map_derivative(z, zeta, &geom, tol)?;
            let mut t = Table::new(
                vec![("z_re".into(), vec![z.re]), ("z_im".into(), vec![z.im])],
                &["f_re", "f_im", "f_abs", "df_re", "df_im"],
            );
            t.rows.push(vec![f.re, f.im, f.norm(), d.re, d.im]);
            t.meta = meta("conformal", None);
            t.meta.insert("b".into(), json!(b));
            t.meta.insert("zeta".into(), json!([zeta.re, zeta.im]));
            io::emit(&t.render(common.format), common.output.as_ref())?;
        }
        Command::Verify { only, tolerance } => return run_verify(common, tol, only.as_deref(), *tolerance),
        Command::ExportGrid { target, b, zeta } => {
            let q = if target.needs_q() {
                Some(require_q(common, "export-grid")?)
            } else {
                None
            };
            let n = common.n.unwrap_or(target.default_points());
            if n == 0 {
                return Err(CliError::Input("--N must be at least 1".into()));
            }
            let settings = export::ConformalSettings {
                b: *b,
                zeta: parse_complex(zeta)?,
            };
            let table = export::export(*target, q, n, tol, &settings)?;
            if *target == Target::WeightW && common.format == Format::Csv {
                eprintln!("awq: weight-w clipped to |x| <= {}", 1.0 - export::WEIGHT_CLIP);
            }
            io::emit(&table.render(common.format), common.output.as_ref())?;
        }
    }
    Ok(0)
}

/// Integral mode of `dq-invert`: samples `(φ_j, g(cos φ_j))` on the periodic
/// trapezoid grid in, `(θ_j, f(cos θ_j))` on the same grid out. The spectral
/// path (U-analysis of the same samples, then `D_q^{-1}`) is evaluated
/// alongside and the largest deviation reported on stderr.
fn invert_integral(
    common: &Common,
    q: QParameter,
    tol: Tolerance,
    path: &std::path::Path,
    text: &str,
) -> Result<(), CliError> {
    let (nodes, values) = io::parse_samples(text, path)?;
    if let Some(m) = common.m {
        if m != nodes.len() {
            return Err(CliError::Input(format!("--M {m} but {} has {} samples", path.display(), nodes.len())));
        }
    }
    let rule = periodic_trapezoid(nodes.len())?;
    rule.check_nodes(&nodes, 1e-12)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let g = SampledFunction::new(rule.clone(), values)?;
    let f = dq_inverse_integral(&g, q, tol, &rule)?;

    let degree = common.n.unwrap_or_else(|| (nodes.len() / 2).saturating_sub(1).min(64));
    let spectral = dq_inverse_spectral(&analyze_u_periodic(&g, degree)?, q);
    let deviation = f
        .nodes()
        .iter()
        .zip(f.values())
        .map(|(&t, &v)| (spectral.synthesize(t.cos()) - v).abs())
        .fold(0.0, f64::max);
    eprintln!("awq: max deviation between integral and spectral paths: {deviation:.3e}");

    let mut t = Table::new(vec![("theta".into(), f.nodes().to_vec())], &["value"]);
    t.rows = f.values().iter().map(|&v| vec![v]).collect();
    t.meta = meta("dq-invert", Some(q));
    t.meta.insert("mode".into(), json!("integral"));
    t.meta.insert("spectral_deviation".into(), json!(deviation));
    io::emit(&t.render(common.format), common.output.as_ref())
}

fn run_verify(common: &Common, tol: Tolerance, only: Option<&str>, forced: Option<f64>) -> Result<i32, CliError> {
    let qs = match common.q {
        Some(q) => vec![QParameter::new(q)?],
        None => verify::DEFAULT_QS
            .iter()
            .map(|&q| QParameter::new(q))
            .collect::<Result<_, _>>()?,
    };
    let names: Vec<&str> = match only {
        Some(name) if verify::SUITES.contains(&name) => vec![name],
        Some(name) => {
            return Err(CliError::Input(format!(
                "unknown suite {name:?}; available: {}",
                verify::SUITES.join(", ")
            )))
        }
        None => verify::SUITES.to_vec(),
    };
    let mut all = true;
    let mut report = String::new();
    for name in names {
        let outcome = verify::run_suite(name, &qs, tol, forced).expect("suite names validated");
        all &= outcome.passed;
        report.push_str(&outcome.line());
        report.push('\n');
    }
    io::emit(&report, common.output.as_ref())?;
    Ok(if all { 0 } else { 1 })
}
