//! Line-oriented text formats.
//!
//! ```text
//! QDESIGN v1
//! q=2 n=4 t=1 k=2 lambda=1
//! # comment
//! 1000;0110
//! ...
//! ```
//!
//! Each block is written as its canonical basis, rows joined by `;`, each
//! row as n base-q digits with coordinate 1 first. `QFLATS v1` uses the same
//! block lines under a `q=<int> n=<int>` header, with `-` for the zero
//! space. `QMATRIX v1` has a `p=<int> m=<int> rows=<int> cols=<int>` header
//! followed by one line per row of space-separated field elements in base-p
//! coefficient form, most significant coefficient first.
//!
//! Readers accept blocks in any order and canonicalize them; writers emit
//! canonical order, so write-read-write is byte-identical.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::derive::DerivedKind;
use crate::design::Design;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::flats::FlatFamily;
use crate::linalg::{Matrix, Subspace};
use crate::qcount::DesignParams;

pub const DESIGN_MAGIC: &str = "QDESIGN v1";
pub const FLATS_MAGIC: &str = "QFLATS v1";
pub const MATRIX_MAGIC: &str = "QMATRIX v1";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-blank, non-comment lines with their 1-based numbers, plus the comments.
fn content_lines(text: &str) -> (Vec<(usize, &str)>, Vec<String>) {
    let mut lines = Vec::new();
    let mut comments = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(c) = l.strip_prefix('#') {
            comments.push(c.trim().to_string());
        } else {
            lines.push((i + 1, l));
        }
    }
    (lines, comments)
}

fn header_fields(line: usize, s: &str, keys: &[&str]) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for tok in s.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| parse_err(line, format!("expected key=value, got {tok:?}")))?;
        if !keys.contains(&k) {
            return Err(parse_err(line, format!("unknown header key {k:?}")));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(parse_err(line, format!("repeated header key {k:?}")));
        }
    }
    for k in keys {
        if !map.contains_key(*k) {
            return Err(parse_err(line, format!("missing header key {k:?}")));
        }
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(line: usize, map: &BTreeMap<String, String>, key: &str) -> Result<T> {
    map[key].parse().map_err(|_| parse_err(line, format!("{key}={:?} is not a nonnegative integer", map[key])))
}

fn expect_magic(lines: &[(usize, &str)], magic: &str) -> Result<()> {
    match lines.first() {
        Some((_, l)) if *l == magic => Ok(()),
        Some((n, l)) => Err(parse_err(*n, format!("expected {magic:?}, got {l:?}"))),
        None => Err(parse_err(1, format!("empty input, expected {magic:?}"))),
    }
}

fn parse_subspace(field: &FieldSpec, n: usize, line: usize, s: &str) -> Result<Subspace> {
    Subspace::parse(field, n, s).map_err(|e| match e {
        Error::Parse { msg, .. } => parse_err(line, msg),
        other => parse_err(line, other.to_string()),
    })
}

/// A design read from text, with the comment lines in order.
#[derive(Debug, Clone)]
pub struct DesignFile {
    pub design: Design,
    pub comments: Vec<String>,
}

pub fn read_design(text: &str) -> Result<DesignFile> {
    let (lines, comments) = content_lines(text);
    expect_magic(&lines, DESIGN_MAGIC)?;
    let &(hl, header) = lines.get(1).ok_or_else(|| parse_err(2, "missing parameter line"))?;
    let h = header_fields(hl, header, &["q", "n", "t", "k", "lambda"])?;
    let q: u64 = num(hl, &h, "q")?;
    let lambda: BigUint = num(hl, &h, "lambda")?;
    let params = DesignParams::new(num(hl, &h, "t")?, num(hl, &h, "n")?, num(hl, &h, "k")?, lambda, q)
        .map_err(|e| parse_err(hl, e.to_string()))?;
    let field = FieldSpec::of_order(q).map_err(|e| parse_err(hl, e.to_string()))?;
    let n = params.n as usize;
    let mut blocks = Vec::new();
    for &(ln, l) in &lines[2..] {
        let b = parse_subspace(&field, n, ln, l)?;
        if b.dim() as u64 != params.k {
            return Err(parse_err(ln, format!("block has dimension {}, expected k = {}", b.dim(), params.k)));
        }
        blocks.push(b);
    }
    let design = Design::new(&field, params, blocks).map_err(|e| parse_err(hl, e.to_string()))?;
    Ok(DesignFile { design, comments })
}

fn block_line(s: &Subspace) -> String {
    if s.is_zero() {
        "-".to_string()
    } else {
        s.to_string()
    }
}

/// Canonical text of a design, with optional comment lines after the header.
pub fn write_design(d: &Design, comments: &[String]) -> String {
    let p = d.params();
    let mut out = format!("{DESIGN_MAGIC}\nq={} n={} t={} k={} lambda={}\n", p.q, p.n, p.t, p.k, p.lambda);
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    for b in d.blocks() {
        out.push_str(&block_line(b));
        out.push('\n');
    }
    out
}

/// The comment recorded on derived designs.
pub fn derived_comment(kind: DerivedKind, source_hash: &str) -> String {
    format!("derived kind={} from={source_hash}", kind.tag())
}

pub fn read_flats(text: &str) -> Result<FlatFamily> {
    let (lines, _) = content_lines(text);
    expect_magic(&lines, FLATS_MAGIC)?;
    let &(hl, header) = lines.get(1).ok_or_else(|| parse_err(2, "missing parameter line"))?;
    let h = header_fields(hl, header, &["q", "n"])?;
    let field = FieldSpec::of_order(num(hl, &h, "q")?).map_err(|e| parse_err(hl, e.to_string()))?;
    let n: usize = num(hl, &h, "n")?;
    let members = lines[2..]
        .iter()
        .map(|&(ln, l)| parse_subspace(&field, n, ln, l))
        .collect::<Result<Vec<_>>>()?;
    FlatFamily::explicit(&field, n, members)
}

pub fn write_flats(field: &FieldSpec, n: usize, members: &[Subspace]) -> String {
    let mut sorted = members.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out = format!("{FLATS_MAGIC}\nq={} n={n}\n", field.q());
    for s in &sorted {
        out.push_str(&block_line(s));
        out.push('\n');
    }
    out
}

pub fn read_matrix(text: &str) -> Result<Matrix> {
    let (lines, _) = content_lines(text);
    expect_magic(&lines, MATRIX_MAGIC)?;
    let &(hl, header) = lines.get(1).ok_or_else(|| parse_err(2, "missing parameter line"))?;
    let h = header_fields(hl, header, &["p", "m", "rows", "cols"])?;
    let field = FieldSpec::new(num(hl, &h, "p")?, num(hl, &h, "m")?).map_err(|e| parse_err(hl, e.to_string()))?;
    let (rows, cols): (usize, usize) = (num(hl, &h, "rows")?, num(hl, &h, "cols")?);
    let body = &lines[2..];
    if body.len() != rows {
        let ln = body.last().map_or(hl, |l| l.0);
        return Err(parse_err(ln, format!("expected {rows} rows, found {}", body.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for &(ln, l) in body {
        let entries: Vec<&str> = l.split_whitespace().collect();
        if entries.len() != cols {
            return Err(parse_err(ln, format!("expected {cols} entries, found {}", entries.len())));
        }
        for e in entries {
            data.push(field.parse_element(e).ok_or_else(|| parse_err(ln, format!("{e:?} is not an element of {field}")))?);
        }
    }
    Matrix::new(&field, rows, cols, data)
}

pub fn write_matrix(m: &Matrix) -> String {
    let f = m.field();
    let mut out = format!("{MATRIX_MAGIC}\np={} m={} rows={} cols={}\n", f.p(), f.m(), m.rows(), m.cols());
    for r in 0..m.rows() {
        let cells: Vec<String> = m.row(r).iter().map(|&x| f.format_element(x)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::desarguesian_spread;
    use crate::Limits;

    fn spread_text() -> String {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let s = desarguesian_spread(4, 2, &f2, &Limits::default()).unwrap();
        write_design(s.design(), &[])
    }

    #[test]
    fn design_roundtrip_is_byte_identical() {
        let text = spread_text();
        assert!(text.starts_with("QDESIGN v1\nq=2 n=4 t=1 k=2 lambda=1\n"));
        assert_eq!(text.lines().count(), 7);
        let back = read_design(&text).unwrap();
        assert_eq!(write_design(&back.design, &back.comments), text);
    }

    #[test]
    fn reader_canonicalizes_and_keeps_comments() {
        let text = spread_text();
        let mut lines: Vec<&str> = text.lines().collect();
        lines[2..].reverse();
        let shuffled = format!("{}\n\n# note\n{}\n", lines[..2].join("\n"), lines[2..].join("\n"));
        let back = read_design(&shuffled).unwrap();
        assert_eq!(back.comments, vec!["note".to_string()]);
        assert_eq!(write_design(&back.design, &[]), text);
        // a non-canonical basis of a block is accepted
        let alt = text.replacen("1000;0100", "1100;0100", 1);
        if alt != text {
            assert_eq!(write_design(&read_design(&alt).unwrap().design, &[]), text);
        }
    }

    #[test]
    fn design_parse_errors() {
        let e = read_design("QDESIGN v2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = read_design("QDESIGN v1\nq=2 n=4 t=1 k=2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = read_design("QDESIGN v1\nq=2 n=4 t=1 k=2 lambda=1\n1000\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = read_design("QDESIGN v1\nq=2 n=4 t=1 k=2 lambda=1\n1000;0120\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = read_design("QDESIGN v1\nq=6 n=4 t=1 k=2 lambda=1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn flats_roundtrip() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let members = vec![Subspace::full(&f2, 3), Subspace::zero(&f2, 3)];
        let text = write_flats(&f2, 3, &members);
        assert_eq!(text, "QFLATS v1\nq=2 n=3\n-\n100;010;001\n");
        let fam = read_flats(&text).unwrap();
        let back = fam.members(&Limits::default()).unwrap();
        assert_eq!(write_flats(&f2, 3, &back), text);
    }

    #[test]
    fn matrix_roundtrip() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        let m = Matrix::from_rows(&f4, &[[1, 2, 3, 0], [0, 1, 2, 3]]).unwrap();
        let text = write_matrix(&m);
        assert_eq!(text, "QMATRIX v1\np=2 m=2 rows=2 cols=4\n01 10 11 00\n00 01 10 11\n");
        assert_eq!(read_matrix(&text).unwrap(), m);
        assert!(read_matrix("QMATRIX v1\np=2 m=2 rows=2 cols=4\n01 10 11 00\n").is_err());
        assert!(read_matrix("QMATRIX v1\np=2 m=2 rows=1 cols=2\n01 12\n").is_err());
    }
}
