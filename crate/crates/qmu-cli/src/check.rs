//! The `check`, `list`, and `report` subcommands.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use qmu::verify::{find_check, registry, run_all, run_check, Report, Tier};
use qmu::Ctx64;

use crate::eval::csv_err;
use crate::out::{self, Format};
use crate::{CliError, CliResult};

/// Nome for the check context. Samplers draw their own q per sample;
/// this only sets the context defaults.
const CHECK_NOME: f64 = 0.25;

#[derive(Args)]
pub struct CheckArgs {
    /// Check name from the registry (see `qmu list`)
    #[arg(required_unless_present = "all", conflicts_with = "all")]
    pub name: Option<String>,

    /// Run every check in the registry
    #[arg(long)]
    pub all: bool,

    /// Samples per check
    #[arg(short = 'n', long = "samples", default_value_t = 50)]
    pub samples: u32,

    /// Base seed for the deterministic sampler
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write reports to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Keep wall-clock timings in the reports (omitted by default so
    /// repeated runs are byte-identical)
    #[arg(long)]
    pub timings: bool,
}

fn tier_of(name: &str) -> Tier {
    find_check(name).map(|d| d.tier()).unwrap_or(Tier::Core)
}

fn tier_str(tier: Tier) -> &'static str {
    match tier {
        Tier::Core => "core",
        Tier::BranchSensitive => "branch-sensitive",
    }
}

pub fn run(args: CheckArgs) -> CliResult {
    let ctx = Ctx64::real_nome(CHECK_NOME)
        .map_err(CliError::eval)?
        .with_seed(args.seed);
    let mut reports = if args.all {
        run_all(args.samples, &ctx)
    } else {
        let name = args.name.as_deref().expect("clap requires name without --all");
        vec![run_check(name, args.samples, &ctx).map_err(CliError::eval)?]
    };
    if !args.timings {
        for r in &mut reports {
            r.wall_time_ms = None;
        }
    }

    let mut w = out::writer(args.output.as_ref())?;
    match args.format {
        Format::Json => {
            for r in &reports {
                writeln!(w, "{}", r.to_json()).map_err(CliError::io)?;
            }
            w.flush().map_err(CliError::io)?;
        }
        Format::Csv => write_reports_csv(w, &reports)?,
        Format::Text => {
            write_reports_text(&mut w, &reports).map_err(CliError::io)?;
            w.flush().map_err(CliError::io)?;
        }
    }

    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass && tier_of(&r.name) == Tier::Core)
        .map(|r| r.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::check_failure(format!(
            "{} core check(s) failed: {}",
            failed.len(),
            failed.join(", ")
        )))
    }
}

fn write_reports_text(w: &mut impl Write, reports: &[Report]) -> std::io::Result<()> {
    for r in reports {
        let status = if r.pass { "PASS" } else { "FAIL" };
        write!(
            w,
            "{status} {:<24} n={:<4} max={:.3e} mean={:.3e}",
            r.name, r.n_samples, r.max_residual, r.mean_residual
        )?;
        if let Some(b) = &r.resolved_base {
            write!(w, " base={b}")?;
        }
        if let Some(f) = r.branch_flips {
            write!(w, " flips={f}")?;
        }
        if let Some(t) = r.wall_time_ms {
            write!(w, " t={t:.1}ms")?;
        }
        if !r.failures.is_empty() {
            write!(w, " failures={}", r.failures.len())?;
        }
        writeln!(w)?;
    }
    if reports.len() > 1 {
        let passed = reports.iter().filter(|r| r.pass).count();
        writeln!(w, "{passed}/{} checks passed", reports.len())?;
    }
    Ok(())
}

fn write_reports_csv(w: Box<dyn Write>, reports: &[Report]) -> CliResult {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "name",
        "tier",
        "n_samples",
        "seed",
        "pass",
        "max_residual",
        "mean_residual",
        "failures",
        "resolved_base",
        "branch_flips",
        "wall_time_ms",
    ])
    .map_err(csv_err)?;
    for r in reports {
        wtr.write_record([
            r.name.clone(),
            tier_str(tier_of(&r.name)).to_string(),
            r.n_samples.to_string(),
            r.seed.to_string(),
            r.pass.to_string(),
            r.max_residual.to_string(),
            r.mean_residual.to_string(),
            r.failures.len().to_string(),
            r.resolved_base.clone().unwrap_or_default(),
            r.branch_flips.map(|f| f.to_string()).unwrap_or_default(),
            r.wall_time_ms.map(|t| t.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(CliError::io)
}

#[derive(Args)]
pub struct ListArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the listing to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run_list(args: ListArgs) -> CliResult {
    let defs = registry();
    let mut w = out::writer(args.output.as_ref())?;
    match args.format {
        Format::Text => {
            for def in defs {
                writeln!(
                    w,
                    "{:<24} {:<16} {:>6.0e}  {}",
                    def.name(),
                    tier_str(def.tier()),
                    def.threshold(),
                    def.statement()
                )
                .map_err(CliError::io)?;
            }
            w.flush().map_err(CliError::io)
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = defs
                .iter()
                .map(|def| {
                    serde_json::json!({
                        "name": def.name(),
                        "statement": def.statement(),
                        "domain": def.domain(),
                        "threshold": def.threshold(),
                        "tier": tier_str(def.tier()),
                    })
                })
                .collect();
            let text = serde_json::to_string_pretty(&rows).expect("listing serializes");
            writeln!(w, "{text}").map_err(CliError::io)?;
            w.flush().map_err(CliError::io)
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(w);
            wtr.write_record(["name", "tier", "threshold", "domain", "statement"])
                .map_err(csv_err)?;
            for def in defs {
                wtr.write_record([
                    def.name(),
                    tier_str(def.tier()),
                    &def.threshold().to_string(),
                    def.domain(),
                    def.statement(),
                ])
                .map_err(csv_err)?;
            }
            wtr.flush().map_err(CliError::io)
        }
    }
}

#[derive(Args)]
pub struct ReportArgs {
    /// Files of newline-delimited report JSON, as written by
    /// `check --format json --output <file>`
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

pub fn run_report(args: ReportArgs) -> CliResult {
    let mut reports: Vec<Report> = Vec::new();
    for path in &args.files {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let report: Report = serde_json::from_str(line).map_err(|e| {
                CliError::usage(format!("{}:{}: bad report JSON: {e}", path.display(), idx + 1))
            })?;
            reports.push(report);
        }
    }
    if reports.is_empty() {
        return Err(CliError::usage("no reports found in the given files"));
    }

    let passed = reports.iter().filter(|r| r.pass).count();
    let worst = reports
        .iter()
        .max_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
        .expect("reports is nonempty");
    println!("{} reports: {} passed, {} failed", reports.len(), passed, reports.len() - passed);
    println!("worst residual: {:.3e} ({})", worst.max_residual, worst.name);
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass && tier_of(&r.name) == Tier::Core)
        .map(|r| r.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        for name in &failed {
            println!("failed: {name}");
        }
        Err(CliError::check_failure(format!("{} core check(s) failed", failed.len())))
    }
}
