//! The `sweep` subcommand: tabulate a function along a real range.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;

use crate::eval::{csv_err, evaluate, EvalFailure, ParamArgs};
use crate::out::{self, Format};
use crate::{CliError, CliResult};

const SWEEPABLE: &[&str] = &["q", "x", "y", "lambda", "z", "nu"];

#[derive(Args)]
pub struct SweepArgs {
    /// Function name, as for `eval`
    pub function: String,

    /// Parameter to vary: one of q, x, y, lambda, z, nu
    #[arg(long)]
    pub vary: String,

    /// First value of the varied parameter
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,

    /// Last value of the varied parameter
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,

    /// Number of rows; 1 evaluates at `from` only
    #[arg(long)]
    pub steps: usize,

    #[command(flatten)]
    pub params: ParamArgs,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the table to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn set_param(p: &mut ParamArgs, name: &str, v: f64) {
    let c = Some(Complex64::new(v, 0.0));
    match name {
        "q" => p.q = c,
        "x" => p.x = c,
        "y" => p.y = c,
        "lambda" => p.lambda = c,
        "z" => p.z = c,
        "nu" => p.nu = c,
        _ => unreachable!("vary name is validated before rows are built"),
    }
}

struct Row {
    v: f64,
    value: Result<Complex64, String>,
}

pub fn run(args: SweepArgs) -> CliResult {
    if !SWEEPABLE.contains(&args.vary.as_str()) {
        return Err(CliError::usage(format!(
            "cannot sweep {:?}; choose one of {}",
            args.vary,
            SWEEPABLE.join(", ")
        )));
    }
    if args.steps == 0 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    if !args.from.is_finite() || !args.to.is_finite() {
        return Err(CliError::usage("--from and --to must be finite"));
    }
    if args.steps > 1 && args.to <= args.from {
        return Err(CliError::usage("range must be ascending: --from < --to"));
    }

    let mut rows = Vec::with_capacity(args.steps);
    for i in 0..args.steps {
        let v = if args.steps == 1 {
            args.from
        } else if i + 1 == args.steps {
            args.to
        } else {
            args.from + (args.to - args.from) * i as f64 / (args.steps - 1) as f64
        };
        let mut params = args.params.clone();
        set_param(&mut params, &args.vary, v);
        let value = match evaluate(&args.function, &params) {
            Ok(val) => Ok(val),
            // A malformed request fails the same way on every row; a
            // guard violation is recorded in the row and the sweep goes on.
            Err(EvalFailure::Usage(m)) => return Err(CliError::usage(m)),
            Err(EvalFailure::Eval(e)) => Err(e.to_string()),
        };
        rows.push(Row { v, value });
    }

    let w = out::writer(args.output.as_ref())?;
    match args.format {
        Format::Csv => write_csv(w, &args.vary, &rows),
        Format::Json => write_json(w, &args.vary, &rows),
        Format::Text => write_text(w, &args.vary, &rows),
    }
}

fn write_csv(w: Box<dyn Write>, vary: &str, rows: &[Row]) -> CliResult {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([vary, "re", "im", "error"]).map_err(csv_err)?;
    for row in rows {
        let record = match &row.value {
            Ok(val) => [row.v.to_string(), val.re.to_string(), val.im.to_string(), String::new()],
            Err(msg) => [row.v.to_string(), String::new(), String::new(), msg.clone()],
        };
        wtr.write_record(&record).map_err(csv_err)?;
    }
    wtr.flush().map_err(CliError::io)
}

fn write_json(mut w: Box<dyn Write>, vary: &str, rows: &[Row]) -> CliResult {
    for row in rows {
        let obj = match &row.value {
            Ok(val) => serde_json::json!({ vary: row.v, "re": val.re, "im": val.im }),
            Err(msg) => serde_json::json!({ vary: row.v, "error": msg }),
        };
        writeln!(w, "{obj}").map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}

fn write_text(mut w: Box<dyn Write>, vary: &str, rows: &[Row]) -> CliResult {
    for row in rows {
        match &row.value {
            Ok(val) => writeln!(w, "{vary}={}\t{}", row.v, out::fmt_complex(*val)),
            Err(msg) => writeln!(w, "{vary}={}\terror: {msg}", row.v),
        }
        .map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}
