//! Plain-text tensor and label files.
//!
//! A tensor file starts with a `dims: d1 d2 ... dK` header followed by the
//! values in row-major order (last mode fastest), separated by any
//! whitespace. Lines whose first non-blank character is `#` are comments.
//! The canonical writer puts one run of the last mode per line and formats
//! each value with the shortest decimal that parses back to the same `f64`
//! (`1.0`, `0.1`, `1e-7`, `1.5e300`).
//!
//! A label file holds one UTF-8 label per line; line `n` (0-based) labels
//! index `n` of its mode.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use mwpam_core::Tensor;

use crate::error::CliError;

pub fn read_tensor(path: &Path) -> Result<Tensor, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_tensor(&text, &path.display().to_string())
}

/// Parses tensor-file text; `source` names the input in diagnostics.
pub fn parse_tensor(text: &str, source: &str) -> Result<Tensor, CliError> {
    let mut dims: Option<(Vec<usize>, usize)> = None;
    let mut values = Vec::new();
    let mut last_line = 0;
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        last_line = lineno;
        let Some((ref d, expected)) = dims else {
            let rest = trimmed
                .strip_prefix("dims:")
                .ok_or_else(|| CliError::parse(source, lineno, "expected a `dims:` header"))?;
            let d = rest
                .split_whitespace()
                .map(|tok| match tok.parse::<usize>() {
                    Ok(v) if v > 0 => Ok(v),
                    _ => Err(CliError::parse(source, lineno, format!("invalid dimension `{tok}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if d.is_empty() {
                return Err(CliError::parse(source, lineno, "header lists no dimensions"));
            }
            let expected = d
                .iter()
                .try_fold(1usize, |acc, &x| acc.checked_mul(x))
                .ok_or_else(|| CliError::parse(source, lineno, "dimensions overflow"))?;
            values.reserve(expected);
            dims = Some((d, expected));
            continue;
        };
        for tok in trimmed.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| CliError::parse(source, lineno, format!("invalid number `{tok}`")))?;
            if !v.is_finite() {
                return Err(CliError::parse(source, lineno, format!("non-finite value `{tok}`")));
            }
            if values.len() == expected {
                return Err(CliError::parse(
                    source,
                    lineno,
                    format!("dims {d:?} expect {expected} values, found more"),
                ));
            }
            values.push(v);
        }
    }
    let Some((dims, expected)) = dims else {
        return Err(CliError::parse(source, last_line.max(1), "missing `dims:` header"));
    };
    if values.len() != expected {
        return Err(CliError::parse(
            source,
            last_line,
            format!("dims {dims:?} expect {expected} values, found {}", values.len()),
        ));
    }
    Tensor::new(dims, values).map_err(|e| CliError::Input(format!("{source}: {e}")))
}

/// Canonical text form of a tensor.
pub fn format_tensor(t: &Tensor) -> String {
    let mut out = String::from("dims:");
    for d in t.dims() {
        write!(out, " {d}").unwrap();
    }
    out.push('\n');
    let row = *t.dims().last().expect("order >= 1");
    for chunk in t.values().chunks(row) {
        for (i, v) in chunk.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_tensor(path: &Path, t: &Tensor) -> Result<(), CliError> {
    fs::write(path, format_tensor(t)).map_err(|e| CliError::io(path, e))
}

pub fn read_labels(path: &Path, expected: usize) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_labels(&text, &path.display().to_string(), expected)
}

pub fn parse_labels(text: &str, source: &str, expected: usize) -> Result<Vec<String>, CliError> {
    let labels: Vec<String> = text.lines().map(str::to_owned).collect();
    if labels.len() != expected {
        return Err(CliError::parse(
            source,
            labels.len().max(1),
            format!("expected {expected} labels, found {}", labels.len()),
        ));
    }
    Ok(labels)
}

pub fn format_labels<S: AsRef<str>>(labels: &[S]) -> String {
    let mut out = String::new();
    for l in labels {
        out.push_str(l.as_ref());
        out.push('\n');
    }
    out
}
