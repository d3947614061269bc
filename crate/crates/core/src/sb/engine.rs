//! Mora's tangent-cone algorithm on packed exponent vectors.
//!
//! Elements are term lists sorted descending in the position-over-term local
//! order. Once the staircase of every position is bounded, all monomials of
//! degree above the highest standard degree lie in the module, so terms of
//! larger degree are dropped from then on.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use super::coeff::Coeff;
use crate::error::{Error, Result};

pub(crate) const MAX_VARS: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Exp {
    pub e: [u16; MAX_VARS],
    pub deg: u32,
}

impl Exp {
    pub const ONE: Exp = Exp { e: [0; MAX_VARS], deg: 0 };

    pub fn from_slice(s: &[u32]) -> Result<Exp> {
        if s.len() > MAX_VARS {
            return Err(Error::ResourceLimit(format!(
                "{} variables exceed the engine limit of {MAX_VARS}",
                s.len()
            )));
        }
        let mut e = [0u16; MAX_VARS];
        for (i, &k) in s.iter().enumerate() {
            e[i] = u16::try_from(k)
                .map_err(|_| Error::ResourceLimit(format!("exponent {k} too large")))?;
        }
        Ok(Exp { e, deg: s.iter().sum() })
    }

    pub fn to_vec(self, nvars: usize) -> Vec<u32> {
        self.e[..nvars].iter().map(|&k| k as u32).collect()
    }

    pub fn var(i: usize, k: u16) -> Exp {
        let mut e = [0u16; MAX_VARS];
        e[i] = k;
        Exp { e, deg: k as u32 }
    }

    /// Local (negative degree reverse lex) comparison; Greater = larger.
    #[inline]
    pub fn cmp_local(&self, o: &Exp) -> Ordering {
        if self.deg != o.deg {
            return o.deg.cmp(&self.deg);
        }
        for i in (0..MAX_VARS).rev() {
            if self.e[i] != o.e[i] {
                return o.e[i].cmp(&self.e[i]);
            }
        }
        Ordering::Equal
    }

    #[inline]
    pub fn divides(&self, o: &Exp) -> bool {
        self.deg <= o.deg && self.e.iter().zip(&o.e).all(|(a, b)| a <= b)
    }

    #[inline]
    pub fn mul(&self, o: &Exp) -> Exp {
        let mut e = self.e;
        for (a, b) in e.iter_mut().zip(&o.e) {
            *a += *b;
        }
        Exp { e, deg: self.deg + o.deg }
    }

    /// `self / o`, assuming `o` divides `self`.
    #[inline]
    pub fn div(&self, o: &Exp) -> Exp {
        let mut e = self.e;
        for (a, b) in e.iter_mut().zip(&o.e) {
            *a -= *b;
        }
        Exp { e, deg: self.deg - o.deg }
    }

    pub fn lcm(&self, o: &Exp) -> Exp {
        let mut e = self.e;
        let mut deg = 0;
        for (a, b) in e.iter_mut().zip(&o.e) {
            *a = (*a).max(*b);
            deg += *a as u32;
        }
        Exp { e, deg }
    }

    pub fn coprime(&self, o: &Exp) -> bool {
        self.e.iter().zip(&o.e).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// The single variable of a pure power, if this is one.
    pub fn pure_var(&self) -> Option<usize> {
        let mut found = None;
        for (i, &k) in self.e.iter().enumerate() {
            if k > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Term<C> {
    pub pos: u32,
    pub m: Exp,
    pub c: C,
}

#[inline]
fn term_cmp(pa: u32, ma: &Exp, pb: u32, mb: &Exp) -> Ordering {
    pb.cmp(&pa).then_with(|| ma.cmp_local(mb))
}

#[derive(Clone, Debug)]
pub(crate) struct Elem<C> {
    pub terms: Vec<Term<C>>,
    pub ecart: u32,
}

impl<C: Coeff> Elem<C> {
    /// Sorts, merges duplicates and normalizes.
    pub fn new(mut terms: Vec<Term<C>>, cx: C::Ctx) -> Elem<C> {
        terms.sort_by(|a, b| term_cmp(b.pos, &b.m, a.pos, &a.m));
        let mut out: Vec<Term<C>> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if last.pos == t.pos && last.m == t.m => {
                    last.c = last.c.add(&t.c, cx);
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.c.is_zero());
        Self::finish(out, cx)
    }

    fn finish(mut terms: Vec<Term<C>>, cx: C::Ctx) -> Elem<C> {
        {
            let mut cs: Vec<&mut C> = terms.iter_mut().map(|t| &mut t.c).collect();
            C::normalize(&mut cs, cx);
        }
        let ecart = match terms.first() {
            Some(lead) => terms.iter().map(|t| t.m.deg).max().unwrap() - lead.m.deg,
            None => 0,
        };
        Elem { terms, ecart }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> &Term<C> {
        &self.terms[0]
    }
}

/// `u*a*f - v*b*g` with the leading terms of both skipped (they cancel).
fn combine<C: Coeff>(
    f: &Elem<C>,
    a: &Exp,
    u: &C,
    g: &Elem<C>,
    b: &Exp,
    v: &C,
    trunc: Option<u32>,
    cx: C::Ctx,
) -> Elem<C> {
    let nv = v.neg(cx);
    let keep = |m: &Exp| trunc.is_none_or(|d| m.deg <= d);
    let mut out = Vec::with_capacity(f.terms.len() + g.terms.len());
    let mut i = 1;
    let mut j = 1;
    while i < f.terms.len() || j < g.terms.len() {
        let fi = f.terms.get(i).map(|t| (t.pos, t.m.mul(a)));
        let gj = g.terms.get(j).map(|t| (t.pos, t.m.mul(b)));
        let ord = match (&fi, &gj) {
            (Some((pf, mf)), Some((pg, mg))) => term_cmp(*pf, mf, *pg, mg),
            (Some(_), None) => Ordering::Greater,
            _ => Ordering::Less,
        };
        match ord {
            Ordering::Greater => {
                let (pos, m) = fi.unwrap();
                if keep(&m) {
                    out.push(Term { pos, m, c: f.terms[i].c.mul(u, cx) });
                }
                i += 1;
            }
            Ordering::Less => {
                let (pos, m) = gj.unwrap();
                if keep(&m) {
                    out.push(Term { pos, m, c: g.terms[j].c.mul(&nv, cx) });
                }
                j += 1;
            }
            Ordering::Equal => {
                let (pos, m) = fi.unwrap();
                let c = f.terms[i].c.mul(u, cx).add(&g.terms[j].c.mul(&nv, cx), cx);
                if !c.is_zero() && keep(&m) {
                    out.push(Term { pos, m, c });
                }
                i += 1;
                j += 1;
            }
        }
    }
    Elem::finish(out, cx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest admissible degree of a basis element's leading monomial.
    pub degree_bound: u32,
    /// Largest admissible number of elementary reduction steps.
    pub step_limit: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { degree_bound: 30, step_limit: 5_000_000 }
    }
}

pub(crate) struct Engine<C: Coeff> {
    pub cx: C::Ctx,
    pub rank: u32,
    pub nvars: usize,
    pub basis: Vec<Elem<C>>,
    pub trunc: Option<u32>,
    budget: Budget,
    steps: u64,
}

impl<C: Coeff> Engine<C> {
    pub fn new(cx: C::Ctx, rank: u32, nvars: usize, budget: Budget) -> Self {
        Engine { cx, rank, nvars, basis: Vec::new(), trunc: None, budget, steps: 0 }
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget.step_limit {
            return Err(Error::ResourceLimit(format!(
                "standard basis exceeded {} reduction steps",
                self.budget.step_limit
            )));
        }
        Ok(())
    }

    fn truncate(&self, mut h: Elem<C>) -> Elem<C> {
        if let Some(d) = self.trunc {
            if h.terms.iter().any(|t| t.m.deg > d) {
                h.terms.retain(|t| t.m.deg <= d);
                h = Elem::finish(h.terms, self.cx);
            }
        }
        h
    }

    /// Mora's weak normal form of `h` with respect to the current basis.
    pub fn normal_form(&mut self, h: Elem<C>) -> Result<Elem<C>> {
        let mut h = self.truncate(h);
        let mut extra: Vec<Elem<C>> = Vec::new();
        loop {
            if h.is_zero() {
                return Ok(h);
            }
            let (hp, hm) = (h.lead().pos, h.lead().m);
            let mut best: Option<(usize, u32)> = None;
            for (k, g) in self.basis.iter().chain(extra.iter()).enumerate() {
                let l = g.lead();
                if l.pos == hp && l.m.divides(&hm) && best.is_none_or(|(_, e)| g.ecart < e) {
                    best = Some((k, g.ecart));
                    if g.ecart == 0 {
                        break;
                    }
                }
            }
            let Some((k, ecart)) = best else {
                return Ok(h);
            };
            self.tick()?;
            if ecart > h.ecart {
                extra.push(h.clone());
            }
            let nb = self.basis.len();
            let g = if k < nb { &self.basis[k] } else { &extra[k - nb] };
            let alpha = hm.div(&g.lead().m);
            let (u, v) = C::cancel(&h.lead().c, &g.lead().c, self.cx);
            h = combine(&h, &Exp::ONE, &u, g, &alpha, &v, self.trunc, self.cx);
        }
    }

    fn spoly(&self, i: usize, j: usize) -> Elem<C> {
        let (f, g) = (&self.basis[i], &self.basis[j]);
        let l = f.lead().m.lcm(&g.lead().m);
        let (u, v) = C::cancel(&f.lead().c, &g.lead().c, self.cx);
        combine(f, &l.div(&f.lead().m), &u, g, &l.div(&g.lead().m), &v, self.trunc, self.cx)
    }

    fn push(&mut self, h: Elem<C>, queue: &mut BinaryHeap<Reverse<(u32, u64, usize, usize)>>, counter: &mut u64) -> Result<()> {
        let lead = h.lead().clone();
        if lead.m.deg > self.budget.degree_bound {
            return Err(Error::ResourceLimit(format!(
                "leading monomial degree {} exceeds the degree bound {}",
                lead.m.deg, self.budget.degree_bound
            )));
        }
        let k = self.basis.len();
        for (i, g) in self.basis.iter().enumerate() {
            let gl = g.lead();
            if gl.pos != lead.pos {
                continue;
            }
            if self.rank == 1 && gl.m.coprime(&lead.m) {
                continue;
            }
            queue.push(Reverse((gl.m.lcm(&lead.m).deg, *counter, i, k)));
            *counter += 1;
        }
        self.basis.push(h);
        self.update_trunc()?;
        Ok(())
    }

    /// Run the pair loop on the given generators.
    pub fn run(&mut self, gens: Vec<Elem<C>>) -> Result<()> {
        let mut queue = BinaryHeap::new();
        let mut counter = 0u64;
        for g in gens {
            let g = self.truncate(g);
            if !g.is_zero() {
                self.push(g, &mut queue, &mut counter)?;
            }
        }
        while let Some(Reverse((_, _, i, j))) = queue.pop() {
            // both leads may have become redundant for truncation; still reduce
            let s = self.spoly(i, j);
            let h = self.normal_form(s)?;
            if !h.is_zero() {
                self.push(h, &mut queue, &mut counter)?;
            }
        }
        Ok(())
    }

    pub fn leads(&self) -> Vec<(u32, Exp)> {
        self.basis.iter().map(|g| (g.lead().pos, g.lead().m)).collect()
    }

    fn update_trunc(&mut self) -> Result<()> {
        if let Some(st) = staircase(&self.leads(), self.rank, self.nvars, 2_000_000)? {
            let d = st.iter().map(|(_, m)| m.deg).max().unwrap_or(0);
            self.trunc = Some(self.trunc.map_or(d, |t| t.min(d)));
        }
        Ok(())
    }
}

/// Standard monomials (position, exponent) outside the monomial module
/// spanned by `leads`; `None` if there are infinitely many.
pub(crate) fn staircase(
    leads: &[(u32, Exp)],
    rank: u32,
    nvars: usize,
    limit: usize,
) -> Result<Option<Vec<(u32, Exp)>>> {
    let mut out = Vec::new();
    for pos in 0..rank {
        let here: Vec<Exp> = leads.iter().filter(|(p, _)| *p == pos).map(|(_, m)| *m).collect();
        if here.iter().any(|m| m.deg == 0) {
            continue;
        }
        for v in 0..nvars {
            if !here.iter().any(|m| m.pure_var() == Some(v)) {
                return Ok(None);
            }
        }
        let mut seen = HashSet::new();
        let mut stack = vec![Exp::ONE];
        seen.insert(Exp::ONE);
        while let Some(m) = stack.pop() {
            out.push((pos, m));
            if out.len() > limit {
                return Err(Error::ResourceLimit(format!("staircase exceeds {limit} monomials")));
            }
            for v in 0..nvars {
                let n = m.mul(&Exp::var(v, 1));
                if !here.iter().any(|l| l.divides(&n)) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
    }
    Ok(Some(out))
}
