//! CSV, JSON and gnuplot `.dat` serialization.
//!
//! Floats are written as `{:.16e}`: 17 significant digits, enough to
//! round-trip every `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with a header row and LF line endings.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Whitespace-separated columns with a `#` header, for gnuplot.
pub fn dat_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = format!("# {}\n", header.join(" "));
    for row in rows {
        let cols: Vec<String> = row.into_iter().map(float).collect();
        let _ = writeln!(out, "{}", cols.join(" "));
    }
    out
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

/// Columns of a profile file; derivative columns may be absent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Profile {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

/// Reads the `X,u[,...]` profile format, ignoring extra columns.
pub fn read_profile(path: &Path) -> Result<Profile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_profile(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_profile(text: &str) -> Result<Profile> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().context("empty profile file")?.split(',').map(str::trim).collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (Some(ix), Some(iu)) = (col("X"), col("u")) else {
        bail!("profile header must contain X and u columns");
    };
    let mut p = Profile::default();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        let get = |i: usize| -> Result<f64> {
            fields
                .get(i)
                .with_context(|| format!("line {} is short", n + 2))?
                .trim()
                .parse()
                .with_context(|| format!("bad number on line {}", n + 2))
        };
        p.x.push(get(ix)?);
        p.u.push(get(iu)?);
    }
    Ok(p)
}
