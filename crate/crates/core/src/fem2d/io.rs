//! Field dumps: a header `P0 N` or `P1 N`, then one grid row per line.
//! P1 rows hold N+1 node values; P0 rows hold 2N cell values (lower and
//! upper triangle of each square in turn).

use std::fmt::Write as _;
use std::path::Path;

use super::{FemError, FieldKind, Result};

pub fn format_field(kind: FieldKind, n: usize, values: &[f64]) -> Result<String> {
    let (rows, cols) = match kind {
        FieldKind::P0 => (n, 2 * n),
        FieldKind::P1 => (n + 1, n + 1),
    };
    if values.len() != rows * cols {
        return Err(FemError::DimensionMismatch {
            expected: rows * cols,
            got: values.len(),
        });
    }
    let mut s = String::new();
    writeln!(s, "{} {n}", kind.label()).unwrap();
    for r in 0..rows {
        let line: Vec<String> = values[r * cols..(r + 1) * cols].iter().map(|v| format!("{v}")).collect();
        writeln!(s, "{}", line.join(" ")).unwrap();
    }
    Ok(s)
}

pub fn parse_field(text: &str) -> Result<(FieldKind, usize, Vec<f64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| FemError::Parse("empty field dump".into()))?;
    let mut it = header.split_whitespace();
    let kind = match it.next() {
        Some("P0") => FieldKind::P0,
        Some("P1") => FieldKind::P1,
        _ => return Err(FemError::Parse(format!("bad header '{header}'"))),
    };
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| FemError::Parse(format!("bad header '{header}'")))?;
    let values = lines
        .flat_map(str::split_whitespace)
        .map(|t| t.parse::<f64>().map_err(|_| FemError::Parse(format!("bad value '{t}'"))))
        .collect::<Result<Vec<f64>>>()?;
    let expected = match kind {
        FieldKind::P0 => 2 * n * n,
        FieldKind::P1 => (n + 1) * (n + 1),
    };
    if values.len() != expected {
        return Err(FemError::DimensionMismatch {
            expected,
            got: values.len(),
        });
    }
    Ok((kind, n, values))
}

pub fn write_field(path: impl AsRef<Path>, kind: FieldKind, n: usize, values: &[f64]) -> Result<()> {
    std::fs::write(path, format_field(kind, n, values)?)?;
    Ok(())
}
