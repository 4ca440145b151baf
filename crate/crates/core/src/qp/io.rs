//! Plain-text QP interchange: a line with `n`, then n rows of Q, then q, ℓ
//! and u, one whitespace-separated vector per line. Bounds may use `inf`
//! and `-inf`.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::linalg::DenseMatrix;

use super::{BoxQP, QpError, Result};

pub fn parse_qp(text: &str) -> Result<BoxQP> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| QpError::Parse("empty input".into()))?;
    let n: usize = header
        .parse()
        .map_err(|_| QpError::Parse(format!("bad dimension line '{header}'")))?;
    let mut row = |what: &str| -> Result<Vec<f64>> {
        let line = lines
            .next()
            .ok_or_else(|| QpError::Parse(format!("missing {what}")))?;
        let v = line
            .split_whitespace()
            .map(parse_number)
            .collect::<Result<Vec<f64>>>()?;
        if v.len() != n {
            return Err(QpError::Parse(format!("{what}: expected {n} entries, got {}", v.len())));
        }
        Ok(v)
    };
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        let r = row(&format!("row {i} of Q"))?;
        if r.iter().any(|v| !v.is_finite()) {
            return Err(QpError::Parse(format!("row {i} of Q has non-finite entries")));
        }
        data.extend(r);
    }
    let q = row("q")?;
    let lower = row("lower bounds")?;
    let upper = row("upper bounds")?;
    BoxQP::dense(DenseMatrix::from_row_major(n, n, data)?, q, lower, upper)
}

fn parse_number(tok: &str) -> Result<f64> {
    match tok {
        "inf" | "+inf" | "Inf" | "+Inf" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-Inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok
            .parse::<f64>()
            .map_err(|_| QpError::Parse(format!("bad number '{tok}'"))),
    }
}

/// Writes the QP with Q in dense form (shortest round-trip float formatting).
pub fn format_qp(qp: &BoxQP) -> Result<String> {
    let q = qp.hessian().to_dense()?;
    let n = qp.n();
    let mut s = String::new();
    writeln!(s, "{n}").unwrap();
    let line = |s: &mut String, v: &[f64]| {
        let toks: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
        writeln!(s, "{}", toks.join(" ")).unwrap();
    };
    for i in 0..n {
        let mut r = q.row(i).to_vec();
        r[i] += qp.shift();
        line(&mut s, &r);
    }
    line(&mut s, qp.q());
    line(&mut s, qp.lower());
    line(&mut s, qp.upper());
    Ok(s)
}

pub fn read_qp(mut r: impl Read) -> Result<BoxQP> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    parse_qp(&text)
}

pub fn write_qp(qp: &BoxQP, mut w: impl Write) -> Result<()> {
    w.write_all(format_qp(qp)?.as_bytes())?;
    Ok(())
}

pub fn load_qp(path: impl AsRef<Path>) -> Result<BoxQP> {
    read_qp(std::fs::File::open(path)?)
}
