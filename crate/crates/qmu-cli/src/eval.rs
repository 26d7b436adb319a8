//! The `eval` subcommand and the function dispatcher shared with `sweep`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use qmu::mock_theta::{appell_a, appell_g, g2_lerch, g2_series, g3_lerch, g3_series, mu, MuArgs};
use qmu::qseries::{qhyper, qpoch_finite, qpoch_inf, qpoch_nu, theta, ThetaMode};
use qmu::transforms::{integral_solution, laplace_minus, ExpansionPoint};
use qmu::{Ctx64, QError};

use crate::complex_arg::{parse_complex, parse_complex_list};
use crate::out::{self, Format};
use crate::{CliError, CliResult};

pub const FUNCTIONS: &[&str] = &[
    "theta",
    "qpoch",
    "qhyper",
    "mu",
    "appell",
    "G",
    "g2",
    "g3",
    "g2_lerch",
    "g3_lerch",
    "laplace_minus_demo",
    "integral_solution",
];

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Sum,
    Product,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum PointArg {
    Zero,
    Infinity,
}

/// Named parameters shared by `eval` and `sweep`. Complex literals use
/// `a+bi` syntax; plain reals are accepted.
#[derive(Args, Clone)]
pub struct ParamArgs {
    /// Nome q, |q| < 1
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: Option<Complex64>,

    /// First variable
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub x: Option<Complex64>,

    /// Second variable (mu, appell)
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub y: Option<Complex64>,

    /// Second variable of G
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: Option<Complex64>,

    /// Series argument (qhyper)
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Option<Complex64>,

    /// Level of appell / G
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub m: Option<u32>,

    /// Finite order (qpoch)
    #[arg(long)]
    pub n: Option<u32>,

    /// Complex order (qpoch)
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub nu: Option<Complex64>,

    /// Monomial power (laplace_minus_demo)
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i32>,

    /// Comma-separated upper parameters (qhyper)
    #[arg(long, allow_hyphen_values = true)]
    pub upper: Option<String>,

    /// Comma-separated lower parameters (qhyper)
    #[arg(long, allow_hyphen_values = true)]
    pub lower: Option<String>,

    /// Comma-separated alpha exponents (integral_solution)
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: Option<String>,

    /// Comma-separated beta exponents (integral_solution)
    #[arg(long, allow_hyphen_values = true)]
    pub betas: Option<String>,

    /// Theta evaluation mode (theta)
    #[arg(long, value_enum, default_value_t = ModeArg::Sum)]
    pub mode: ModeArg,

    /// Expansion point (integral_solution)
    #[arg(long, value_enum, default_value_t = PointArg::Zero)]
    pub point: PointArg,

    /// Relative tolerance override
    #[arg(long)]
    pub tol: Option<f64>,

    /// Series/product term cap override
    #[arg(long)]
    pub max_terms: Option<usize>,

    /// Contour radius override (laplace_minus_demo, integral_solution)
    #[arg(long)]
    pub contour_radius: Option<f64>,

    /// Starting contour node count override
    #[arg(long)]
    pub contour_points: Option<usize>,
}

/// Why a function evaluation did not produce a value: the request itself
/// was malformed, or the library rejected the point.
pub enum EvalFailure {
    Usage(String),
    Eval(QError),
}

impl From<EvalFailure> for CliError {
    fn from(f: EvalFailure) -> Self {
        match f {
            EvalFailure::Usage(m) => CliError::usage(m),
            EvalFailure::Eval(e) => CliError::eval(e),
        }
    }
}

impl ParamArgs {
    fn list(field: Option<&String>) -> Result<Vec<Complex64>, EvalFailure> {
        match field {
            None => Ok(Vec::new()),
            Some(s) => parse_complex_list(s).map_err(EvalFailure::Usage),
        }
    }

    fn theta_mode(&self) -> ThetaMode {
        match self.mode {
            ModeArg::Sum => ThetaMode::Sum,
            ModeArg::Product => ThetaMode::Product,
        }
    }

    fn expansion_point(&self) -> ExpansionPoint {
        match self.point {
            PointArg::Zero => ExpansionPoint::Zero,
            PointArg::Infinity => ExpansionPoint::Infinity,
        }
    }
}

fn need(v: Option<Complex64>, flag: &str, function: &str) -> Result<Complex64, EvalFailure> {
    v.ok_or_else(|| EvalFailure::Usage(format!("{function} requires {flag}")))
}

fn need_m(p: &ParamArgs, function: &str) -> Result<u32, EvalFailure> {
    p.m.ok_or_else(|| EvalFailure::Usage(format!("{function} requires --m")))
}

fn build_ctx(p: &ParamArgs) -> Result<Ctx64, EvalFailure> {
    let q = p.q.ok_or_else(|| EvalFailure::Usage("--q is required".into()))?;
    let mut ctx = Ctx64::new(q).map_err(EvalFailure::Eval)?;
    if let Some(tol) = p.tol {
        ctx = ctx.with_tol(tol).map_err(EvalFailure::Eval)?;
    }
    if let Some(mt) = p.max_terms {
        ctx = ctx.with_max_terms(mt).map_err(EvalFailure::Eval)?;
    }
    if let Some(r) = p.contour_radius {
        ctx = ctx.with_contour_radius(r).map_err(EvalFailure::Eval)?;
    }
    if let Some(n) = p.contour_points {
        ctx = ctx.with_contour_points(n).map_err(EvalFailure::Eval)?;
    }
    Ok(ctx)
}

/// Evaluates one named function from the CLI parameter set.
pub fn evaluate(function: &str, p: &ParamArgs) -> Result<Complex64, EvalFailure> {
    let ctx = build_ctx(p)?;
    let lib = EvalFailure::Eval;
    match function {
        "theta" => {
            let x = need(p.x, "--x", function)?;
            theta(x, p.theta_mode(), &ctx).map_err(lib)
        }
        "qpoch" => {
            let x = need(p.x, "--x", function)?;
            if let Some(n) = p.n {
                Ok(qpoch_finite(x, n, &ctx))
            } else if let Some(nu) = p.nu {
                qpoch_nu(x, nu, &ctx).map_err(lib)
            } else {
                qpoch_inf(x, &ctx).map_err(lib)
            }
        }
        "qhyper" => {
            let z = need(p.z, "--z", function)?;
            let upper = ParamArgs::list(p.upper.as_ref())?;
            let lower = ParamArgs::list(p.lower.as_ref())?;
            qhyper(&upper, &lower, z, &ctx).map_err(lib)
        }
        "mu" => {
            let x = need(p.x, "--x", function)?;
            let y = need(p.y, "--y", function)?;
            let args = MuArgs::in_ctx(x, y, &ctx).map_err(lib)?;
            mu(&args, &ctx).map_err(lib)
        }
        "appell" => {
            let m = need_m(p, function)?;
            let x = need(p.x, "--x", function)?;
            let y = need(p.y, "--y", function)?;
            appell_a(m, x, y, &ctx).map_err(lib)
        }
        "G" => {
            let m = need_m(p, function)?;
            let x = need(p.x, "--x", function)?;
            let lambda = need(p.lambda.or(p.y), "--lambda", function)?;
            appell_g(m, x, lambda, &ctx).map_err(lib)
        }
        "g2" => {
            let x = need(p.x, "--x", function)?;
            g2_series(x, &ctx).map_err(lib)
        }
        "g3" => {
            let x = need(p.x, "--x", function)?;
            g3_series(x, &ctx).map_err(lib)
        }
        "g2_lerch" => {
            let x = need(p.x, "--x", function)?;
            g2_lerch(x, &ctx).map_err(lib)
        }
        "g3_lerch" => {
            let x = need(p.x, "--x", function)?;
            g3_lerch(x, &ctx).map_err(lib)
        }
        "laplace_minus_demo" => {
            let x = need(p.x, "--x", function)?;
            let k = p.k.unwrap_or(1);
            laplace_minus(move |xi| Ok(xi.powi(k)), x, &ctx).map_err(lib)
        }
        "integral_solution" => {
            let x = need(p.x, "--x", function)?;
            let alphas = ParamArgs::list(p.alphas.as_ref())?;
            let betas = ParamArgs::list(p.betas.as_ref())?;
            if alphas.is_empty() || betas.is_empty() {
                return Err(EvalFailure::Usage(
                    "integral_solution requires --alphas and --betas".into(),
                ));
            }
            integral_solution(p.expansion_point(), &alphas, &betas, x, &ctx).map_err(lib)
        }
        other => Err(EvalFailure::Usage(format!(
            "unknown function {other:?}; expected one of {}",
            FUNCTIONS.join(", ")
        ))),
    }
}

#[derive(Args)]
pub struct EvalArgs {
    /// One of: theta, qpoch, qhyper, mu, appell, G, g2, g3, g2_lerch,
    /// g3_lerch, laplace_minus_demo, integral_solution
    pub function: String,

    #[command(flatten)]
    pub params: ParamArgs,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write output to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: EvalArgs) -> CliResult {
    let v = evaluate(&args.function, &args.params)?;
    let mut w = out::writer(args.output.as_ref())?;
    match args.format {
        Format::Text => writeln!(w, "{}", out::fmt_complex(v)).map_err(CliError::io)?,
        Format::Json => {
            let obj = serde_json::json!({ "function": args.function, "re": v.re, "im": v.im });
            writeln!(w, "{obj}").map_err(CliError::io)?;
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(w);
            wtr.write_record(["re", "im"]).map_err(csv_err)?;
            wtr.write_record([v.re.to_string(), v.im.to_string()])
                .map_err(csv_err)?;
            wtr.flush().map_err(CliError::io)?;
            return Ok(());
        }
    }
    w.flush().map_err(CliError::io)
}

pub fn csv_err(e: csv::Error) -> CliError {
    if e.is_io_error() {
        if let csv::ErrorKind::Io(io) = e.into_kind() {
            return CliError::io(io);
        }
        unreachable!("is_io_error guarantees an Io kind");
    }
    CliError::usage(format!("csv: {e}"))
}
