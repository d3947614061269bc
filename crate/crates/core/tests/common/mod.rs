//! Independent oracles: linear algebra in truncated polynomial rings.
#![allow(dead_code)]

use std::collections::BTreeSet;

use icis::ring::{Monomial, Polynomial, Rational, RingSpec};
use num_traits::Zero;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn ring(fiber: &str, params: &str) -> RingSpec {
    RingSpec::from_names(fiber, params).unwrap()
}

pub fn poly(text: &str, r: &RingSpec) -> Polynomial {
    icis::ring::parse_polynomial(text, r).unwrap()
}

/// All monomials of degree <= d, largest first in the local order.
pub fn monomials_upto(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one(n)];
    let mut frontier = vec![Monomial::one(n)];
    for _ in 0..d {
        let mut next = BTreeSet::new();
        for m in &frontier {
            for i in 0..n {
                next.insert(m.mul(&Monomial::var(n, i)));
            }
        }
        frontier = next.into_iter().collect();
        out.extend(frontier.iter().cloned());
    }
    out.sort();
    out.reverse();
    out
}

/// Leading monomials of `(gens) + m^(d+1)` restricted to degree <= d, by
/// row echelon form of the Macaulay matrix of the truncated ideal.
pub fn macaulay_leading(gens: &[Polynomial], n: usize, d: u32) -> BTreeSet<Monomial> {
    let mons = monomials_upto(n, d);
    let index: std::collections::HashMap<&Monomial, usize> =
        mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for g in gens {
        for a in &mons {
            let mut row = vec![Rational::zero(); mons.len()];
            let mut any = false;
            for (m, c) in g.terms() {
                let p = m.mul(a);
                if let Some(&k) = index.get(&p) {
                    row[k] = c.clone();
                    any = true;
                }
            }
            if any {
                rows.push(row);
            }
        }
    }
    let mut pivots = BTreeSet::new();
    let mut r = 0;
    for col in 0..mons.len() {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Rational::from_integer(1.into()) / rows[r][col].clone();
        let pivot: Vec<Rational> = rows[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for k in col..mons.len() {
                    let t = &pivot[k] * &f;
                    rows[i][k] -= t;
                }
            }
        }
        rows[r] = pivot;
        pivots.insert(mons[col].clone());
        r += 1;
    }
    pivots
}

/// Colength of `(gens) + m^(d+1)`; equals the colength of `(gens)` once
/// `m^(d+1)` lies in the ideal.
pub fn macaulay_colength(gens: &[Polynomial], n: usize, d: u32) -> usize {
    monomials_upto(n, d).len() - macaulay_leading(gens, n, d).len()
}

/// Minimal generators of a monomial set.
pub fn minimal(set: &BTreeSet<Monomial>) -> BTreeSet<Monomial> {
    set.iter()
        .filter(|m| !set.iter().any(|o| o != *m && o.divides(m)))
        .cloned()
        .collect()
}

/// Colength of `(gens)` at 0, found by raising the truncation degree until
/// `colength((gens) + m^(d+1))` stops growing (then m^(d+1) lies in the ideal
/// by Nakayama). `None` if it never stabilizes below `max_d`.
pub fn oracle_colength(gens: &[Polynomial], n: usize, max_d: u32) -> Option<usize> {
    let mut prev = macaulay_colength(gens, n, 0);
    for d in 1..=max_d {
        let c = macaulay_colength(gens, n, d);
        if c == prev {
            return Some(c);
        }
        prev = c;
    }
    None
}

/// Milnor number of a hypersurface from the Jacobian ideal.
pub fn oracle_milnor(f: &Polynomial, max_d: u32) -> Option<usize> {
    let n = f.nvars();
    let partials: Vec<Polynomial> = (0..n).map(|i| f.derivative(i)).collect();
    oracle_colength(&partials, n, max_d)
}

/// Samuel multiplicity of an ideal on a plane curve {g = 0}: the eventual
/// first difference of colength((g) + I^k).
pub fn oracle_curve_samuel(g: &Polynomial, ideal: &[Polynomial], max_d: u32) -> Option<usize> {
    let n = g.nvars();
    let mut power = vec![Polynomial::one(n)];
    let mut diffs = Vec::new();
    let mut prev = 0usize;
    for _ in 0..8 {
        power = power.iter().flat_map(|a| ideal.iter().map(move |b| a * b)).collect();
        power.dedup();
        let mut gens = vec![g.clone()];
        gens.extend(power.iter().cloned());
        let c = oracle_colength(&gens, n, max_d)?;
        diffs.push(c - prev);
        prev = c;
        if diffs.len() >= 3 && diffs[diffs.len() - 1] == diffs[diffs.len() - 2] && diffs[diffs.len() - 2] == diffs[diffs.len() - 3] {
            return diffs.last().copied();
        }
    }
    None
}
