//! The germ-family file format.
//!
//! ```text
//! # comment
//! vars: v w
//! params: y
//! F: w^2 - v^3 + v^2*y
//! f: v
//! locus: branches
//! arc phi { w = t^2, v = t, y = t - t^2 }
//! chain: z ; x^2 + y^3
//! module N: s*t^2 + t^3 ; s*t^4
//! module J: jacobian absolute
//! element h: t^3
//! dependence: h on N strict
//! ```
//!
//! Module columns of rank > 1 are written `[a, b] ; [c, d]`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::arc::{parse_series, Arc};
use crate::error::{Error, Result};
use crate::family::{jacobian_module, GermFamily, JacobianKind, Locus};
use crate::ring::{parse_polynomial, ParseError, Polynomial, RingSpec, Series};
use crate::sb::SubmoduleOfFree;

pub const DEFAULT_TRUNCATION: u32 = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct Dependence {
    pub element: String,
    pub module: String,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GermFile {
    pub family: GermFamily,
    /// Arc components in ring-variable order; truncation is applied later.
    pub arcs: Vec<(String, Vec<Series>)>,
    pub chain: Vec<Polynomial>,
    pub modules: BTreeMap<String, SubmoduleOfFree>,
    pub elements: BTreeMap<String, Vec<Polynomial>>,
    pub dependences: Vec<Dependence>,
}

impl GermFile {
    pub fn arc(&self, name: &str, truncation: u32) -> Result<Arc> {
        let (_, comps) = self
            .arcs
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| Error::InvalidInput(format!("no arc named {name}")))?;
        Arc::new(name, comps.clone(), truncation)
    }
}

fn dsl(line: usize, message: impl Into<String>) -> Error {
    Error::Dsl { line, message: message.into() }
}

fn located(line: usize, offset: usize, e: ParseError) -> Error {
    dsl(line, format!("column {}: {e}", offset + e.position() + 1))
}

/// Split at `sep` outside brackets, returning (byte offset, piece).
fn split_top(text: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

struct Raw {
    vars: Option<(usize, String)>,
    params: Option<(usize, String)>,
    eqs: Option<(usize, usize, String)>,
    f: Option<(usize, usize, String)>,
    locus: Locus,
    arcs: Vec<(usize, String)>,
    chain: Option<(usize, usize, String)>,
    modules: Vec<(usize, usize, String, String)>,
    elements: Vec<(usize, usize, String, String)>,
    deps: Vec<(usize, String)>,
}

/// Column where `value` starts within the original line.
fn value_col(line: &str, value: &str) -> usize {
    line.find(value).unwrap_or(0)
}

pub fn parse_germ_file(text: &str) -> Result<GermFile> {
    let mut raw = Raw {
        vars: None,
        params: None,
        eqs: None,
        f: None,
        locus: Locus::Section,
        arcs: Vec::new(),
        chain: None,
        modules: Vec::new(),
        elements: Vec::new(),
        deps: Vec::new(),
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")));
    while let Some((no, line)) = lines.next() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("arc ") {
            let mut body = rest.to_string();
            while !body.contains('}') {
                let Some((_, more)) = lines.next() else {
                    return Err(dsl(no, "unterminated arc block"));
                };
                body.push(' ');
                body.push_str(more.trim());
            }
            raw.arcs.push((no, body));
            continue;
        }
        let Some((key, value)) = trimmed.split_once(':') else {
            return Err(dsl(no, format!("expected `key: value`, found `{trimmed}`")));
        };
        let value = value.trim().to_string();
        let col = value_col(line, &value);
        let once = |slot: bool| if slot { Err(dsl(no, format!("duplicate `{}`", key.trim()))) } else { Ok(()) };
        let key = key.trim();
        if let Some(name) = key.strip_prefix("module ") {
            raw.modules.push((no, col, name.trim().to_string(), value));
            continue;
        }
        if let Some(name) = key.strip_prefix("element ") {
            raw.elements.push((no, col, name.trim().to_string(), value));
            continue;
        }
        match key {
            "vars" => {
                once(raw.vars.is_some())?;
                raw.vars = Some((no, value));
            }
            "params" => {
                once(raw.params.is_some())?;
                raw.params = Some((no, value));
            }
            "F" => {
                once(raw.eqs.is_some())?;
                raw.eqs = Some((no, col, value));
            }
            "f" => {
                once(raw.f.is_some())?;
                raw.f = Some((no, col, value));
            }
            "chain" => {
                once(raw.chain.is_some())?;
                raw.chain = Some((no, col, value));
            }
            "locus" => {
                raw.locus = match value.as_str() {
                    "section" => Locus::Section,
                    "branches" => Locus::Branches,
                    other => return Err(dsl(no, format!("unknown locus `{other}`"))),
                }
            }
            "dependence" => raw.deps.push((no, value)),
            other => return Err(dsl(no, format!("unknown key `{other}`"))),
        }
    }
    build(raw)
}

fn poly_list(ring: &RingSpec, no: usize, col: usize, text: &str) -> Result<Vec<Polynomial>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top(text, ';')
        .into_iter()
        .map(|(off, piece)| {
            parse_polynomial(piece, ring).map_err(|e| located(no, col + off, e))
        })
        .collect()
}

fn column(ring: &RingSpec, no: usize, col: usize, text: &str) -> Result<Vec<Polynomial>> {
    let t = text.trim();
    let lead = col + leading_ws(text);
    if let Some(inner) = t.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| dsl(no, format!("column {}: missing `]`", lead + 1)))?;
        split_top(inner, ',')
            .into_iter()
            .map(|(off, piece)| parse_polynomial(piece, ring).map_err(|e| located(no, lead + 1 + off, e)))
            .collect()
    } else {
        Ok(vec![parse_polynomial(text, ring).map_err(|e| located(no, col, e))?])
    }
}

fn jacobian_kind(word: &str) -> Option<JacobianKind> {
    Some(match word {
        "absolute" => JacobianKind::Absolute,
        "relative" => JacobianKind::Relative,
        "param" => JacobianKind::Param,
        "augmented" => JacobianKind::Augmented,
        "augmented_relative" => JacobianKind::AugmentedRelative,
        "augmented_param" => JacobianKind::AugmentedParam,
        _ => return None,
    })
}

fn build(raw: Raw) -> Result<GermFile> {
    let (vno, vars) = raw.vars.ok_or_else(|| dsl(1, "missing `vars:` line"))?;
    let params = raw.params.map(|p| p.1).unwrap_or_default();
    let ring = RingSpec::from_names(&vars, &params).map_err(|e| dsl(vno, e.to_string()))?;
    let eqs = match &raw.eqs {
        Some((no, col, text)) => poly_list(&ring, *no, *col, text)?,
        None => Vec::new(),
    };
    let f = match &raw.f {
        Some((no, col, text)) => Some(parse_polynomial(text, &ring).map_err(|e| located(*no, *col, e))?),
        None => None,
    };
    let family_line = raw.eqs.as_ref().map_or(vno, |e| e.0);
    let family = GermFamily::new(ring.clone(), eqs, f, raw.locus).map_err(|e| match e {
        Error::InvalidInput(m) => dsl(family_line, m),
        e => e,
    })?;
    let chain = match &raw.chain {
        Some((no, col, text)) => poly_list(&ring, *no, *col, text)?,
        None => Vec::new(),
    };

    let mut arcs: Vec<(String, Vec<Series>)> = Vec::new();
    for (no, body) in &raw.arcs {
        let (name, rest) = body.split_once('{').ok_or_else(|| dsl(*no, "expected `arc NAME { ... }`"))?;
        let name = name.trim().to_string();
        if name.is_empty() || arcs.iter().any(|(n, _)| *n == name) {
            return Err(dsl(*no, format!("missing or duplicate arc name `{name}`")));
        }
        let inner = rest.split('}').next().unwrap_or("");
        let mut comps: Vec<Option<Series>> = vec![None; ring.nvars()];
        for (_, piece) in split_top(inner, ',') {
            if piece.trim().is_empty() {
                continue;
            }
            let (var, series) = piece
                .split_once('=')
                .ok_or_else(|| dsl(*no, format!("expected `var = series`, found `{}`", piece.trim())))?;
            let idx = ring
                .var_index(var.trim())
                .ok_or_else(|| dsl(*no, format!("unknown variable `{}` in arc {name}", var.trim())))?;
            let s = parse_series(series).map_err(|e| dsl(*no, format!("arc {name}: {e}")))?;
            if !s.coeff(0).is_zero() {
                return Err(dsl(*no, format!("arc {name}: component {} has a constant term", var.trim())));
            }
            comps[idx] = Some(s);
        }
        let comps = comps.into_iter().map(|c| c.unwrap_or_else(|| Series::zero(None))).collect();
        arcs.push((name, comps));
    }

    let mut modules = BTreeMap::new();
    for (no, col, name, text) in &raw.modules {
        let words: Vec<&str> = text.split_whitespace().collect();
        let m = if words.first() == Some(&"jacobian") {
            let kind = words
                .get(1)
                .and_then(|w| jacobian_kind(w))
                .ok_or_else(|| dsl(*no, "expected `jacobian absolute|relative|param|augmented...`"))?;
            jacobian_module(&family, kind).map_err(|e| dsl(*no, e.to_string()))?
        } else {
            let cols: Vec<Vec<Polynomial>> = split_top(text, ';')
                .into_iter()
                .map(|(off, piece)| column(&ring, *no, col + off, piece))
                .collect::<Result<_>>()?;
            let rank = cols.first().map_or(1, Vec::len);
            SubmoduleOfFree::new(ring.clone(), rank, cols, family.equations.clone())
                .map_err(|e| dsl(*no, e.to_string()))?
        };
        if modules.insert(name.clone(), m).is_some() {
            return Err(dsl(*no, format!("duplicate module `{name}`")));
        }
    }
    let mut elements = BTreeMap::new();
    for (no, col, name, text) in &raw.elements {
        if elements.insert(name.clone(), column(&ring, *no, *col, text)?).is_some() {
            return Err(dsl(*no, format!("duplicate element `{name}`")));
        }
    }
    let mut dependences = Vec::new();
    for (no, text) in &raw.deps {
        let words: Vec<&str> = text.split_whitespace().collect();
        let (element, module, strict) = match words.as_slice() {
            [h, "on", m] => (h, m, false),
            [h, "on", m, "strict"] => (h, m, true),
            _ => return Err(dsl(*no, "expected `dependence: ELEMENT on MODULE [strict]`")),
        };
        let (Some(h), Some(m)) = (elements.get(*element), modules.get(*module)) else {
            return Err(dsl(*no, format!("unknown element `{element}` or module `{module}`")));
        };
        if h.len() != m.rank {
            return Err(dsl(*no, format!("element `{element}` does not match the rank of `{module}`")));
        }
        dependences.push(Dependence { element: element.to_string(), module: module.to_string(), strict });
    }
    Ok(GermFile { family, arcs, chain, modules, elements, dependences })
}

/// Just the family of a germ file.
pub fn load_family(text: &str) -> Result<GermFamily> {
    parse_germ_file(text).map(|g| g.family)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_respects_brackets() {
        let v: Vec<&str> = split_top("[a, b] ; (c; d)", ';').into_iter().map(|p| p.1).collect();
        assert_eq!(v, vec!["[a, b] ", " (c; d)"]);
    }
}
