//! CSV and JSON writers. CSV floats use Rust's shortest round-trip
//! scientific form, so identical results give identical bytes.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `ma,mb,p[,err]`, every cell of the grid in row-major order.
pub fn matrix_csv(p: &[Vec<f64>], err: Option<&[Vec<f64>]>) -> String {
    let mut out = String::from(if err.is_some() { "ma,mb,p,err\n" } else { "ma,mb,p\n" });
    for (ma, row) in p.iter().enumerate() {
        for (mb, v) in row.iter().enumerate() {
            let _ = write!(out, "{ma},{mb},{v:e}");
            if let Some(e) = err {
                let _ = write!(out, ",{:e}", e[ma][mb]);
            }
            out.push('\n');
        }
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
