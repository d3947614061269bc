//! Pullback of modules along arcs and elementary-divisor orders over the
//! one-variable power series ring.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{parse_polynomial, Polynomial, Rational, RingSpec, Series};
use crate::sb::SubmoduleOfFree;

/// One series per ambient variable, all without constant term. Work is done
/// modulo t^T, with a second pass at 2T when the components are known there.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    pub name: String,
    pub components: Vec<Series>,
    pub truncation_order: u32,
}

impl Arc {
    pub fn new(name: impl Into<String>, components: Vec<Series>, truncation_order: u32) -> Result<Self> {
        if truncation_order == 0 {
            return Err(Error::InvalidInput("truncation order must be at least 1".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if !c.coeff(0).is_zero() {
                return Err(Error::InvalidInput(format!("arc component {} has a constant term", i + 1)));
            }
            if c.trunc().is_some_and(|t| t < truncation_order) {
                return Err(Error::InvalidInput(format!(
                    "arc component {} is known only below order {}",
                    i + 1,
                    c.trunc().unwrap()
                )));
            }
        }
        Ok(Arc { name: name.into(), components, truncation_order })
    }

    pub fn with_truncation(&self, t: u32) -> Result<Self> {
        Arc::new(self.name.clone(), self.components.clone(), t)
    }

    /// Largest precision at which every component is known.
    fn known(&self) -> Option<u32> {
        self.components.iter().filter_map(Series::trunc).min()
    }

    fn at(&self, n: u32) -> Vec<Series> {
        self.components.iter().map(|c| c.with_trunc(Some(n))).collect()
    }

    fn exact(&self) -> Option<Vec<Series>> {
        self.known().is_none().then(|| self.components.clone())
    }
}

/// A polynomial in `t`, read as an exact series.
pub fn parse_series(text: &str) -> Result<Series> {
    let ring = RingSpec::from_names("t", "")?;
    let p = parse_polynomial(text, &ring)?;
    Ok(series_of(&p))
}

/// Univariate polynomial to exact series.
pub fn series_of(p: &Polynomial) -> Series {
    let deg = p.degree() as usize;
    let mut c = vec![Rational::zero(); deg + 1];
    for (m, v) in p.terms() {
        c[m.degree() as usize] += v;
    }
    Series::from_coeffs(c, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderProfile {
    /// Ascending elementary-divisor exponents, one per row of the module.
    pub orders: Vec<Order>,
}

impl fmt::Display for OrderProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.orders.iter().map(Order::to_string).collect();
        write!(f, "[{}]", v.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Val {
    Exact(u32),
    /// Zero modulo the working precision.
    AtLeast(u32),
    Inf,
}

/// Elementary-divisor exponents of the column span of `mat` (rows x cols),
/// entries known modulo t^n (or exact when `n` is `None`).
fn smith_orders(mut mat: Vec<Vec<Series>>, n: Option<u32>) -> Vec<Val> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    let mut live_r: Vec<usize> = (0..rows).collect();
    let mut live_c: Vec<usize> = (0..cols).collect();
    let mut out = Vec::with_capacity(rows);
    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        for &i in &live_r {
            for &j in &live_c {
                if let Some(v) = mat[i][j].valuation() {
                    if best.is_none_or(|(b, _, _)| v < b) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        let pivot = mat[pi][pj].clone();
        // Padding the quotients with zeros is harmless: their unknown tail
        // only meets entries of valuation >= v, so it lands beyond t^n.
        let exact = |x: Series| Series::from_coeffs(x.coeffs().to_vec(), None);
        let unit = exact(pivot.shift_down(v));
        // clear the pivot row by column operations
        for &j in &live_c {
            if j == pj || mat[pi][j].is_known_zero() {
                continue;
            }
            let q = exact(mat[pi][j].shift_down(v));
            for &i in &live_r {
                let a = mat[i][j].mul(&unit);
                let b = mat[i][pj].mul(&q);
                mat[i][j] = a.sub(&b).with_trunc(n);
            }
        }
        // clear the pivot column by row operations
        for &i in &live_r {
            if i == pi || mat[i][pj].is_known_zero() {
                continue;
            }
            let q = exact(mat[i][pj].shift_down(v));
            for &j in &live_c {
                let a = mat[i][j].mul(&unit);
                let b = mat[pi][j].mul(&q);
                mat[i][j] = a.sub(&b).with_trunc(n);
            }
        }
        out.push(Val::Exact(v));
        live_r.retain(|&i| i != pi);
        live_c.retain(|&j| j != pj);
    }
    for _ in 0..live_r.len() {
        out.push(match n {
            Some(n) => Val::AtLeast(n),
            None => Val::Inf,
        });
    }
    out
}

fn pull_back_matrix(cols: &[Vec<Polynomial>], rank: usize, comps: &[Series]) -> Vec<Vec<Series>> {
    (0..rank)
        .map(|i| cols.iter().map(|c| c[i].substitute_series(comps)).collect())
        .collect()
}

fn check_on_germ(m: &SubmoduleOfFree, arc: &Arc) -> Result<()> {
    if arc.components.len() != m.nvars() {
        return Err(Error::InvalidInput(format!(
            "arc has {} components, ring has {} variables",
            arc.components.len(),
            m.nvars()
        )));
    }
    let comps = arc.at(arc.truncation_order);
    for (k, r) in m.relations.iter().enumerate() {
        if !r.substitute_series(&comps).is_known_zero() {
            return Err(Error::ArcNotOnGerm(format!(
                "equation {} does not vanish to order {} along {}",
                k + 1,
                arc.truncation_order,
                arc.name
            )));
        }
    }
    Ok(())
}

/// Orders at T, re-verified at 2T; zero rows are certified infinite only by
/// an exact computation on a polynomial arc.
fn certified_orders(cols: &[Vec<Polynomial>], rank: usize, arc: &Arc) -> Result<Vec<Val>> {
    let t = arc.truncation_order;
    let first = smith_orders(pull_back_matrix(cols, rank, &arc.at(t)), Some(t));
    let t2 = arc.known().map_or(2 * t, |k| k.min(2 * t));
    if t2 > t {
        let second = smith_orders(pull_back_matrix(cols, rank, &arc.at(t2)), Some(t2));
        for (a, b) in first.iter().zip(&second) {
            if let Val::Exact(x) = a {
                if *b != Val::Exact(*x) {
                    return Err(Error::Internal(format!("order {x} at T changed at 2T")));
                }
            }
        }
    }
    if !first.iter().any(|v| matches!(v, Val::AtLeast(_))) {
        return Ok(first);
    }
    let Some(exact) = arc.exact() else { return Ok(first) };
    let full = smith_orders(pull_back_matrix(cols, rank, &exact), None);
    Ok(first
        .iter()
        .zip(&full)
        .map(|(a, b)| match (a, b) {
            (Val::AtLeast(_), Val::Inf) => Val::Inf,
            _ => *a,
        })
        .collect())
}

/// Elementary-divisor exponents of M∘φ.
pub fn pull_back_orders(m: &SubmoduleOfFree, arc: &Arc) -> Result<OrderProfile> {
    check_on_germ(m, arc)?;
    let vals = certified_orders(&m.gens, m.rank, arc)?;
    let mut orders = Vec::with_capacity(vals.len());
    for v in vals {
        orders.push(match v {
            Val::Exact(n) => Order::Finite(n),
            Val::Inf => Order::Infinite,
            Val::AtLeast(_) => return Err(Error::Inconclusive(arc.truncation_order)),
        });
    }
    Ok(OrderProfile { orders })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Dependence {
    /// This arc does not refute dependence.
    Consistent,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Dependence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dependence::Consistent => "CONSISTENT",
            Dependence::Refuted => "REFUTED",
            Dependence::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Is h∘φ in M∘φ (strict: in t·M∘φ, the maximal ideal of the arc times it)?
/// Adding h∘φ to the module lowers some elementary order exactly when it
/// is not a member.
pub fn arc_dependence_test(h: &[Polynomial], m: &SubmoduleOfFree, arc: &Arc, strict: bool) -> Result<Dependence> {
    if h.len() != m.rank {
        return Err(Error::InvalidInput("element has the wrong number of entries".into()));
    }
    check_on_germ(m, arc)?;
    // strict: compare against t·M∘φ, whose orders are shifted by one
    let base = certified_orders(&m.gens, m.rank, arc)?;
    let shift = u32::from(strict);
    let base: Vec<Val> = base
        .into_iter()
        .map(|v| match v {
            Val::Exact(k) => Val::Exact(k + shift),
            other => other,
        })
        .collect();
    let ext = if strict {
        strict_extension_orders(&m.gens, h, m.rank, arc)?
    } else {
        let mut cols = m.gens.clone();
        cols.push(h.to_vec());
        certified_orders(&cols, m.rank, arc)?
    };
    let mut unsure = false;
    for (a, b) in base.iter().zip(&ext) {
        match (a, b) {
            (Val::Exact(x), Val::Exact(y)) if y < x => return Ok(Dependence::Refuted),
            (Val::AtLeast(t), Val::Exact(y)) if y < t => return Ok(Dependence::Refuted),
            (Val::Inf, Val::Exact(_)) => return Ok(Dependence::Refuted),
            (Val::Exact(x), Val::Exact(y)) if x == y => {}
            (Val::Inf, Val::Inf) => {}
            _ => unsure = true,
        }
    }
    Ok(if unsure { Dependence::Inconclusive } else { Dependence::Consistent })
}

/// Orders of t·M∘φ + <h∘φ>.
fn strict_extension_orders(cols: &[Vec<Polynomial>], h: &[Polynomial], rank: usize, arc: &Arc) -> Result<Vec<Val>> {
    let run = |comps: &[Series], n: Option<u32>| {
        let mut mat = pull_back_matrix(cols, rank, comps);
        for row in mat.iter_mut() {
            for e in row.iter_mut() {
                *e = e.shift_up(1).with_trunc(n);
            }
        }
        for (i, row) in mat.iter_mut().enumerate() {
            row.push(h[i].substitute_series(comps).with_trunc(n));
        }
        smith_orders(mat, n)
    };
    let t = arc.truncation_order;
    let first = run(&arc.at(t), Some(t));
    let t2 = arc.known().map_or(2 * t, |k| k.min(2 * t));
    if t2 > t {
        let second = run(&arc.at(t2), Some(t2));
        for (a, b) in first.iter().zip(&second) {
            if let Val::Exact(x) = a {
                if *b != Val::Exact(*x) {
                    return Err(Error::Internal(format!("order {x} at T changed at 2T")));
                }
            }
        }
    }
    if !first.iter().any(|v| matches!(v, Val::AtLeast(_))) {
        return Ok(first);
    }
    let Some(exact) = arc.exact() else { return Ok(first) };
    let full = run(&exact, None);
    Ok(first
        .iter()
        .zip(&full)
        .map(|(a, b)| match (a, b) {
            (Val::AtLeast(_), Val::Inf) => Val::Inf,
            _ => *a,
        })
        .collect())
}
