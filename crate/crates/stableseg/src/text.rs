//! Market and segmentation text files.
//!
//! A market file has one `<value> <mass>` record per line. A segmentation
//! file repeats blocks of a `segment <price>` header followed by such
//! records. Numbers are integers or `p/q` fractions; `#` starts a comment.

use std::fmt::Write;

use num_traits::Zero;
use stableseg_core::{Coalition, Market, Rational, Segmentation, TransportPlan};

use crate::error::{CliError, ParseError};

/// Whitespace-separated tokens of a line with their 1-based columns,
/// ignoring everything after `#`.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (k, ch) in content.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(k),
            (true, Some(s)) => {
                out.push((s, &content[s..k]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &content[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (content[..byte].chars().count() + 1, tok))
        .collect()
}

pub fn parse_rational(token: &str, line: usize, column: usize) -> Result<Rational, ParseError> {
    let bad = |why: &str| ParseError::new(line, column, format!("{why}: `{token}`"));
    if let Some((_, den)) = token.split_once('/') {
        if den.trim_start_matches(['+', '-']).chars().all(|c| c == '0') && !den.is_empty() {
            return Err(bad("zero denominator"));
        }
    }
    token
        .parse::<Rational>()
        .map_err(|_| bad("not an integer or fraction"))
}

/// A `<value> <mass>` record.
fn record(line: usize, toks: &[(usize, &str)]) -> Result<(Rational, Rational, usize), ParseError> {
    match toks {
        [(cv, v), (cm, m)] => Ok((
            parse_rational(v, line, *cv)?,
            parse_rational(m, line, *cm)?,
            *cv,
        )),
        [(c, _)] => Err(ParseError::new(line, *c, "expected `<value> <mass>`")),
        [_, _, (c, extra), ..] => Err(ParseError::new(
            line,
            *c,
            format!("unexpected token `{extra}`"),
        )),
        [] => unreachable!("blank lines are skipped"),
    }
}

pub struct ParsedMarket {
    pub market: Market,
    pub warnings: Vec<String>,
}

fn located(path: &str) -> impl Fn(ParseError) -> CliError + '_ {
    move |error| CliError::Parse {
        path: path.to_string(),
        error,
    }
}

pub fn parse_market(
    input: &str,
) -> Result<Result<ParsedMarket, stableseg_core::Error>, ParseError> {
    let mut pairs: Vec<(Rational, Rational)> = Vec::new();
    let mut seen: Vec<(Rational, usize)> = Vec::new();
    let mut warnings = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        let (value, mass, column) = record(k + 1, &toks)?;
        if let Some((_, first)) = seen.iter().find(|(v, _)| v == &value) {
            return Err(ParseError::new(
                k + 1,
                column,
                format!("duplicate value {value} (first on line {first})"),
            ));
        }
        seen.push((value.clone(), k + 1));
        if mass.is_zero() {
            warnings.push(format!(
                "line {}: dropping value {value} with zero mass",
                k + 1
            ));
            continue;
        }
        pairs.push((value, mass));
    }
    Ok(Market::from_pairs(pairs).map(|market| ParsedMarket { market, warnings }))
}

/// Parses a segmentation against `market`; values absent from a block have
/// zero mass in that segment.
pub fn parse_segmentation(
    input: &str,
    market: &Market,
) -> Result<Result<Segmentation, stableseg_core::Error>, ParseError> {
    let mut parts: Vec<(Rational, Vec<Rational>)> = Vec::new();
    let mut filled: Vec<Vec<bool>> = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line_no = k + 1;
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        if toks[0].1 == "segment" {
            match toks.as_slice() {
                [_, (c, p)] => {
                    parts.push((
                        parse_rational(p, line_no, *c)?,
                        vec![Rational::zero(); market.len()],
                    ));
                    filled.push(vec![false; market.len()]);
                }
                [(c, _)] => return Err(ParseError::new(line_no, *c, "expected `segment <price>`")),
                [_, _, (c, extra), ..] => {
                    return Err(ParseError::new(
                        line_no,
                        *c,
                        format!("unexpected token `{extra}`"),
                    ))
                }
                [] => unreachable!(),
            }
            continue;
        }
        let (value, mass, column) = record(line_no, &toks)?;
        let (Some((_, masses)), Some(done)) = (parts.last_mut(), filled.last_mut()) else {
            return Err(ParseError::new(
                line_no,
                toks[0].0,
                "record before the first `segment` header",
            ));
        };
        let Some(i) = market.value_index(&value) else {
            return Ok(Err(stableseg_core::Error::UnknownValue { value }));
        };
        if done[i] {
            return Err(ParseError::new(
                line_no,
                column,
                format!("value {value} repeated in segment"),
            ));
        }
        done[i] = true;
        masses[i] = mass;
    }
    let build = || {
        let parts = parts
            .into_iter()
            .map(|(price, mass)| Ok((Coalition::new(market, mass)?, price)))
            .collect::<Result<Vec<_>, stableseg_core::Error>>()?;
        Segmentation::from_parts(market, parts)
    };
    Ok(build())
}

pub fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}

pub fn load_market(path: &str) -> Result<ParsedMarket, CliError> {
    Ok(parse_market(&read_file(path)?).map_err(located(path))??)
}

pub fn load_segmentation(path: &str, market: &Market) -> Result<Segmentation, CliError> {
    Ok(parse_segmentation(&read_file(path)?, market).map_err(located(path))??)
}

pub fn write_market(m: &Market) -> String {
    let mut out = String::new();
    for (v, f) in m.values().iter().zip(m.masses()) {
        writeln!(out, "{v} {f}").unwrap();
    }
    out
}

/// Writes positive masses only, segments in their current order.
pub fn write_segmentation(s: &Segmentation) -> String {
    let mut out = String::new();
    for (k, seg) in s.segments().iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        writeln!(out, "segment {}", seg.price()).unwrap();
        for i in seg.coalition().support() {
            writeln!(
                out,
                "{} {}",
                s.market().values()[i],
                seg.coalition().mass_at(i)
            )
            .unwrap();
        }
    }
    out
}

/// One `<from> <to> <value> <mass>` line per positive cell; segment numbers
/// are positions in the source and target segmentations.
pub fn write_plan(plan: &TransportPlan) -> String {
    let values = plan.source().market().values();
    let mut out = String::new();
    for (a, b, i, mass) in plan.cells() {
        writeln!(out, "{a} {b} {} {mass}", values[i]).unwrap();
    }
    out
}
