//! Output plumbing shared by the subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use num_complex::Complex64;

use crate::CliError;

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Opens the output sink: a buffered file when `--output` is given,
/// stdout otherwise.
pub fn writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout())),
    }
}

/// Renders a complex value as `a+bi`. The default float formatter emits
/// the shortest digit string that round-trips exactly, so printed values
/// parse back bit-identical.
pub fn fmt_complex(v: Complex64) -> String {
    format!("{}{:+}i", v.re, v.im)
}
