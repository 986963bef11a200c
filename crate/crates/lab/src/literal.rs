//! Distribution literals and quantile-table files.
//!
//! A literal lists atoms and optionally one table:
//!
//! ```text
//! {0: 0.3, 1: 0.5, inf: 0.2}
//! {0: 1/4} + table(heavy.tsv, 3/4)
//! table(heavy.tsv)
//! ```
//!
//! Table files hold two columns per line, a cumulative probability and a
//! value, separated by whitespace or a comma. `#` starts a comment.

use std::fs;
use std::path::{Path, PathBuf};

use fppflow_core::distributions::QuantileTable;
use fppflow_core::{Distribution, Prob, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LiteralError {
    #[error("malformed distribution literal `{0}`: {1}")]
    Syntax(String, &'static str),
    #[error("bad number `{0}`: {1}")]
    Number(String, fppflow_core::Error),
    #[error("table file {0}: {1}")]
    Table(PathBuf, String),
    #[error("invalid distribution: {0}")]
    Invalid(fppflow_core::Error),
}

/// Parse a literal; relative table paths resolve against `base`.
pub fn parse_distribution(text: &str, quantum: u64, base: &Path) -> Result<Distribution, LiteralError> {
    let syntax = |why| LiteralError::Syntax(text.to_string(), why);
    let mut atoms: Vec<(Option<Value>, Prob)> = Vec::new();
    let mut table: Option<QuantileTable> = None;
    for part in split_top_level(text) {
        let part = part.trim();
        if let Some(body) = part.strip_prefix('{') {
            let body = body.strip_suffix('}').ok_or_else(|| syntax("unclosed brace"))?;
            for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (v, m) = item.split_once(':').ok_or_else(|| syntax("atom needs `value: mass`"))?;
                let v = v.trim();
                let value = if v == "inf" { None } else { Some(number(v)?) };
                atoms.push((value, prob(m.trim())?));
            }
        } else if let Some(args) = part.strip_prefix("table(") {
            if table.is_some() {
                return Err(syntax("at most one table"));
            }
            let args = args.strip_suffix(')').ok_or_else(|| syntax("unclosed table("))?;
            let (path, mass) = match args.split_once(',') {
                Some((p, m)) => (p.trim(), prob(m.trim())?),
                None => (args.trim(), Prob::ONE),
            };
            let path = base.join(path);
            let points = read_table(&path)?;
            table = Some(QuantileTable { points, mass });
        } else {
            return Err(syntax("expected `{...}` or `table(...)`"));
        }
    }
    if atoms.is_empty() && table.is_none() {
        return Err(syntax("empty distribution"));
    }
    Distribution::from_parts(quantum, &atoms, table.as_ref()).map_err(LiteralError::Invalid)
}

/// Relative or absolute table paths a literal refers to, as written.
pub fn table_paths(text: &str) -> Vec<String> {
    split_top_level(text)
        .into_iter()
        .filter_map(|part| {
            let args = part.trim().strip_prefix("table(")?.strip_suffix(')')?;
            Some(args.split(',').next().unwrap_or("").trim().to_string())
        })
        .collect()
}

fn split_top_level(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '{' | '(' => depth += 1,
            '}' | ')' => depth -= 1,
            '+' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

fn number(s: &str) -> Result<Value, LiteralError> {
    Value::parse(s).map_err(|e| LiteralError::Number(s.to_string(), e))
}

fn prob(s: &str) -> Result<Prob, LiteralError> {
    Prob::parse(s).map_err(|e| LiteralError::Number(s.to_string(), e))
}

pub fn read_table(path: &Path) -> Result<Vec<(Prob, Value)>, LiteralError> {
    let text = fs::read_to_string(path).map_err(|e| LiteralError::Table(path.to_path_buf(), e.to_string()))?;
    parse_table(&text).map_err(|why| LiteralError::Table(path.to_path_buf(), why))
}

pub fn parse_table(text: &str) -> Result<Vec<(Prob, Value)>, String> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if cols.len() != 2 {
            return Err(format!("line {}: expected two columns", lineno + 1));
        }
        let p = Prob::parse(cols[0]).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let v = Value::parse(cols[1]).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        out.push((p, v));
    }
    Ok(out)
}

pub fn format_table(points: &[(Prob, Value)]) -> String {
    let mut s = String::from("# cumulative probability, value\n");
    for (p, v) in points {
        s.push_str(&format!("{p}\t{v}\n"));
    }
    s
}

/// Quantized law with survival `t^{-1/2}` on `[1, inf)`: on the `j`-th of
/// `steps` equal probability cells the value is the quantile at the left
/// end, `(steps / (steps - j + 1))^2`. The surrogate is dominated by the
/// continuous law.
pub fn heavy_tail_table(steps: u64) -> Vec<(Prob, Value)> {
    let n = steps as u128;
    (1..=n)
        .map(|j| {
            let r = n - j + 1;
            (
                Prob::new(j, n).expect("j <= n"),
                Value::new(n * n, r * r).expect("nonzero"),
            )
        })
        .collect()
}
