//! Text and JSON design files.
//!
//! Text layout: `n p q` on the first line, the `p + q` level counts on the
//! second, then `n` rows of `p` integer levels followed by `q` quantitative
//! entries. A quantitative token containing `.`, `e` or `E` is a raw
//! unit-interval value; a bare integer is a level mapped through
//! [`level_to_unit`]. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use super::{level_to_unit, Design, DesignSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Entry {
    Level(usize),
    Raw(f64),
}

fn assemble(spec: DesignSpec, rows: Vec<Vec<Entry>>, lines: &[usize]) -> Result<Design> {
    let p = spec.qualitative();
    let mut qual = Vec::with_capacity(rows.len());
    let mut quant = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut qrow = Vec::with_capacity(p);
        for (k, e) in row[..p].iter().enumerate() {
            match *e {
                Entry::Level(l) => qrow.push(l),
                Entry::Raw(_) => {
                    return Err(Error::Parse {
                        line: lines[i],
                        message: format!("row {i}, column {k}: qualitative entries must be integer levels"),
                    })
                }
            }
        }
        let mut xrow = Vec::with_capacity(spec.quantitative());
        for (k, e) in row[p..].iter().enumerate() {
            let s = spec.level(p + k);
            let value = match *e {
                Entry::Level(l) => level_to_unit(l, s).map_err(|_| Error::Entry {
                    row: i,
                    column: p + k,
                    message: format!("level {l} outside 0..{s}"),
                })?,
                Entry::Raw(x) => x,
            };
            xrow.push(value);
        }
        qual.push(qrow);
        quant.push(xrow);
    }
    Design::from_raw(spec, &qual, &quant)
}

/// Parses the text design format.
pub fn parse_text(input: &str) -> Result<Design> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `n p q` header".into(),
    })?;
    let head: Vec<usize> = parse_ints(hline, header)?;
    let [n, p, q] = head[..] else {
        return Err(Error::Parse {
            line: hline,
            message: format!("header needs exactly 3 integers, got {}", head.len()),
        });
    };
    let (lline, level_line) = lines.next().ok_or(Error::Parse {
        line: hline + 1,
        message: "missing level-count line".into(),
    })?;
    let levels = parse_ints(lline, level_line)?;
    let spec = DesignSpec::new(n, p, q, levels).map_err(|e| Error::Parse {
        line: lline,
        message: e.to_string(),
    })?;

    let mut rows = Vec::with_capacity(n);
    let mut row_lines = Vec::with_capacity(n);
    for (line, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != p + q {
            return Err(Error::Parse {
                line,
                message: format!("row {} has {} entries, expected {}", rows.len(), tokens.len(), p + q),
            });
        }
        let row = tokens
            .iter()
            .enumerate()
            .map(|(k, t)| {
                parse_entry(t).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("row {}, column {k}: cannot read `{t}`", rows.len()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
        row_lines.push(line);
    }
    if rows.len() != n {
        return Err(Error::Parse {
            line: row_lines.last().copied().unwrap_or(lline),
            message: format!("expected {n} rows, found {}", rows.len()),
        });
    }
    assemble(spec, rows, &row_lines)
}

fn parse_ints(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| Error::Parse {
                line,
                message: format!("`{t}` is not a non-negative integer"),
            })
        })
        .collect()
}

fn parse_entry(token: &str) -> Option<Entry> {
    if token.contains(['.', 'e', 'E']) {
        token.parse().ok().map(Entry::Raw)
    } else {
        token.parse().ok().map(Entry::Level)
    }
}

/// Quantitative entries are written as levels when they equal the lattice
/// value exactly, otherwise in shortest round-trip decimal form.
fn quant_entry(design: &Design, row: usize, k: usize) -> Entry {
    let x = *design.quant(row, k);
    match design.quant_level(row, k) {
        Some(l) if level_to_unit::<f64>(l, design.spec().level(design.spec().qualitative() + k)).ok() == Some(x) => {
            Entry::Level(l)
        }
        _ => Entry::Raw(x),
    }
}

pub fn to_text(design: &Design) -> String {
    let spec = design.spec();
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", spec.runs(), spec.qualitative(), spec.quantitative());
    let levels: Vec<String> = spec.levels().iter().map(usize::to_string).collect();
    let _ = writeln!(out, "{}", levels.join(" "));
    for i in 0..design.runs() {
        let mut tokens: Vec<String> = design.qual_row(i).iter().map(usize::to_string).collect();
        for k in 0..spec.quantitative() {
            tokens.push(match quant_entry(design, i, k) {
                Entry::Level(l) => l.to_string(),
                Entry::Raw(x) => format!("{x:?}"),
            });
        }
        let _ = writeln!(out, "{}", tokens.join(" "));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonDesign {
    n: usize,
    p: usize,
    q: usize,
    levels: Vec<usize>,
    rows: Vec<Vec<Value>>,
}

pub fn parse_json(input: &str) -> Result<Design> {
    let raw: JsonDesign = serde_json::from_str(input).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let spec = DesignSpec::new(raw.n, raw.p, raw.q, raw.levels)?;
    if raw.rows.len() != raw.n {
        return Err(Error::domain(format!(
            "expected {} rows, found {}",
            raw.n,
            raw.rows.len()
        )));
    }
    let mut rows = Vec::with_capacity(raw.n);
    for (i, row) in raw.rows.iter().enumerate() {
        if row.len() != spec.factors() {
            return Err(Error::Entry {
                row: i,
                column: row.len(),
                message: format!("expected {} entries", spec.factors()),
            });
        }
        let parsed = row
            .iter()
            .enumerate()
            .map(|(k, v)| match v {
                Value::Number(num) if num.is_u64() => Ok(Entry::Level(num.as_u64().unwrap_or_default() as usize)),
                Value::Number(num) if num.is_f64() => Ok(Entry::Raw(num.as_f64().unwrap_or(f64::NAN))),
                other => Err(Error::Entry {
                    row: i,
                    column: k,
                    message: format!("`{other}` is not a level or unit-interval value"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(parsed);
    }
    let lines = vec![0; rows.len()];
    assemble(spec, rows, &lines)
}

pub fn to_json_value(design: &Design) -> Value {
    let spec = design.spec();
    let rows = (0..design.runs())
        .map(|i| {
            let mut row: Vec<Value> = design.qual_row(i).iter().map(|&l| Value::from(l)).collect();
            for k in 0..spec.quantitative() {
                row.push(match quant_entry(design, i, k) {
                    Entry::Level(l) => Value::from(l),
                    Entry::Raw(x) => Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null),
                });
            }
            row
        })
        .collect();
    serde_json::to_value(JsonDesign {
        n: spec.runs(),
        p: spec.qualitative(),
        q: spec.quantitative(),
        levels: spec.levels().to_vec(),
        rows,
    })
    .unwrap_or(Value::Null)
}

pub fn to_json(design: &Design) -> String {
    serde_json::to_string_pretty(&to_json_value(design)).unwrap_or_default()
}

/// Parses either format, choosing JSON when the first non-blank character
/// is `{`.
pub fn parse_any(input: &str) -> Result<Design> {
    if input.trim_start().starts_with('{') {
        parse_json(input)
    } else {
        parse_text(input)
    }
}
