//! DIMACS WCNF reader and writer (the format with an explicit `top` weight
//! in the header; a clause whose weight equals `top` is hard).

use std::fmt::Write as _;

use super::{Clause, Lit, SoftClause, WcnfInstance, WeightValue};
use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    ClauseCountMismatch { declared: usize, found: usize },
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseWarning::ClauseCountMismatch { declared, found } => {
                write!(f, "header declares {declared} clauses but {found} were read")
            }
        }
    }
}

pub fn parse_wcnf<W: WeightValue>(text: &str) -> Result<WcnfInstance<W>> {
    parse_wcnf_with_warnings(text).map(|(inst, _)| inst)
}

struct Header<W> {
    num_vars: u32,
    num_clauses: usize,
    top: Option<W>,
}

fn parse_header<W: WeightValue>(line_no: usize, line: &str) -> Result<Header<W>, ParseError> {
    let malformed = |reason: &str| ParseError::MalformedHeader {
        line: line_no,
        reason: reason.to_string(),
    };
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 4 || toks.len() > 5 || toks[0] != "p" {
        return Err(malformed("expected `p wcnf <nvars> <nclauses> <top>`"));
    }
    if toks[1] != "wcnf" {
        return Err(malformed("format must be `wcnf`"));
    }
    let num_vars: u32 = toks[2]
        .parse()
        .map_err(|_| malformed("variable count is not a non-negative integer"))?;
    let num_clauses: usize = toks[3]
        .parse()
        .map_err(|_| malformed("clause count is not a non-negative integer"))?;
    let top = match toks.get(4) {
        Some(t) => {
            let top: W = t.parse().map_err(|_| malformed("top is not a positive integer"))?;
            if top.is_zero() {
                return Err(malformed("top must be positive"));
            }
            Some(top)
        }
        None => None,
    };
    Ok(Header {
        num_vars,
        num_clauses,
        top,
    })
}

/// Parses WCNF text, returning the instance and any non-fatal warnings.
///
/// Comment lines (`c ...`) and blank lines are skipped. A header without the
/// `top` field is accepted and then every clause is soft.
pub fn parse_wcnf_with_warnings<W: WeightValue>(text: &str) -> Result<(WcnfInstance<W>, Vec<ParseWarning>)> {
    let mut header: Option<Header<W>> = None;
    let mut hard = Vec::new();
    let mut soft = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::DuplicateHeader { line: line_no }.into());
            }
            header = Some(parse_header(line_no, line)?);
            continue;
        }
        let Some(h) = header.as_ref() else {
            return Err(ParseError::MissingHeader { line: line_no }.into());
        };

        let mut toks = line.split_whitespace();
        let wtok = toks.next().expect("line is non-empty");
        let invalid = |token: &str| ParseError::InvalidToken {
            line: line_no,
            token: token.to_string(),
        };
        if wtok.starts_with('-') || wtok.parse::<i128>().map(|v| v <= 0).unwrap_or(false) {
            if wtok.parse::<i128>().is_ok() {
                return Err(ParseError::NonPositiveWeight { line: line_no }.into());
            }
            return Err(invalid(wtok).into());
        }
        let weight: W = wtok.parse().map_err(|_| invalid(wtok))?;
        if let Some(top) = h.top {
            if weight > top {
                return Err(ParseError::WeightAboveTop { line: line_no }.into());
            }
        }

        let mut lits = Vec::new();
        let mut terminated = false;
        for tok in toks {
            if terminated {
                return Err(invalid(tok).into());
            }
            let v: i64 = tok.parse().map_err(|_| invalid(tok))?;
            if v == 0 {
                terminated = true;
                continue;
            }
            if v.unsigned_abs() > u64::from(h.num_vars) {
                return Err(ParseError::LiteralOutOfRange {
                    line: line_no,
                    lit: v,
                    num_vars: h.num_vars,
                }
                .into());
            }
            lits.push(Lit::from_dimacs(v as i32));
        }
        if !terminated {
            return Err(ParseError::MissingTerminator { line: line_no }.into());
        }
        let clause = Clause::new(lits);
        if Some(weight) == h.top {
            hard.push(clause);
        } else {
            soft.push(SoftClause { clause, weight });
        }
    }

    let Some(h) = header else {
        return Err(ParseError::NoHeader { line: last_line }.into());
    };
    let mut warnings = Vec::new();
    let found = hard.len() + soft.len();
    if found != h.num_clauses {
        warnings.push(ParseWarning::ClauseCountMismatch {
            declared: h.num_clauses,
            found,
        });
    }
    let inst = WcnfInstance::new(h.num_vars, hard, soft)?;
    Ok((inst, warnings))
}

/// Serializes with `top = 1 + sum of soft weights`; soft clauses first.
pub fn write_wcnf<W: WeightValue>(instance: &WcnfInstance<W>) -> Result<String> {
    let top = instance.soft_weight_sum().add_checked(W::one())?;
    let mut out = String::new();
    let n = instance.soft().len() + instance.hard().len();
    writeln!(out, "p wcnf {} {} {}", instance.num_vars(), n, top).expect("string write");
    let mut line = |w: &dyn std::fmt::Display, c: &Clause| {
        write!(out, "{w}").expect("string write");
        for l in c.lits() {
            write!(out, " {l}").expect("string write");
        }
        out.push_str(" 0\n");
    };
    for s in instance.soft() {
        line(&s.weight, &s.clause);
    }
    for c in instance.hard() {
        line(&top, c);
    }
    Ok(out)
}

impl<W: WeightValue> std::str::FromStr for WcnfInstance<W> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_wcnf(s)
    }
}
