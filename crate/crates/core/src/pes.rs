//! Plain-text format for polynomial equation systems.
//!
//! ```text
//! # comment
//! pes <q> <n> <m>
//! poly <t>
//! <coeff> <e1> ... <en>      (t lines)
//! ...                         (m blocks)
//! ```
//!
//! Coefficients and exponents are decimal element indices; coefficients are
//! nonzero and exponents lie in `0..=q-1`. Blank lines and lines starting
//! with `#` are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{parse_err, Error, Result};
use crate::field::Field;
use crate::mpoly::{PolySystem, Polynomial};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            None
        } else {
            Some((i + 1, t.split_whitespace().collect()))
        }
    })
}

fn number(tok: &str, line: usize) -> Result<u64> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, found `{tok}`")))
}

/// Parses a system in the text format.
pub fn parse_pes(text: &str) -> Result<PolySystem> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    if header.len() != 4 || header[0] != "pes" {
        return Err(parse_err(line, "expected header `pes <q> <n> <m>`"));
    }
    let q = number(header[1], line)?;
    let n = number(header[2], line)? as usize;
    let m = number(header[3], line)? as usize;
    let field = Arc::new(Field::new(q).map_err(|e| parse_err(line, e.to_string()))?);

    let mut polys = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, block) = lines
            .next()
            .ok_or_else(|| parse_err(line, format!("expected {m} polynomial blocks")))?;
        if block.len() != 2 || block[0] != "poly" {
            return Err(parse_err(line, "expected `poly <t>`"));
        }
        let t = number(block[1], line)? as usize;
        let mut seen = BTreeSet::new();
        let mut terms = Vec::with_capacity(t);
        for _ in 0..t {
            let (line, toks) = lines
                .next()
                .ok_or_else(|| parse_err(line, format!("expected {t} term lines")))?;
            if toks.len() != n + 1 {
                return Err(parse_err(
                    line,
                    format!("expected {} numbers per term, found {}", n + 1, toks.len()),
                ));
            }
            let c = number(toks[0], line)?;
            if c == 0 || c >= q {
                return Err(parse_err(line, format!("coefficient {c} outside 1..{q}")));
            }
            let exps = toks[1..]
                .iter()
                .map(|tok| {
                    let e = number(tok, line)?;
                    if e >= q {
                        Err(parse_err(line, format!("exponent {e} outside 0..{q}")))
                    } else {
                        Ok(e)
                    }
                })
                .collect::<Result<Vec<u64>>>()?;
            if !seen.insert(exps.clone()) {
                return Err(parse_err(line, "duplicate monomial"));
            }
            terms.push((exps, field.elem(c)?));
        }
        polys.push(Polynomial::from_terms(&field, n, terms)?);
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "trailing content after the last block"));
    }
    PolySystem::new(&field, n, polys)
}

/// Serializes a list of polynomials over one field and arity.
pub fn write_polys(field: &Field, nvars: usize, polys: &[Polynomial]) -> String {
    let mut out = String::new();
    writeln!(out, "pes {} {} {}", field.order(), nvars, polys.len()).unwrap();
    for p in polys {
        writeln!(out, "poly {}", p.num_terms()).unwrap();
        for (m, c) in p.terms() {
            write!(out, "{c}").unwrap();
            for e in m.exponents() {
                write!(out, " {e}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}

pub fn write_pes(system: &PolySystem) -> String {
    write_polys(system.field(), system.nvars(), system.polys())
}

/// Serializes a single polynomial as a one-equation file.
pub fn write_polynomial(p: &Polynomial) -> String {
    write_polys(p.field(), p.nvars(), std::slice::from_ref(p))
}

impl std::str::FromStr for PolySystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<PolySystem> {
        parse_pes(s)
    }
}
