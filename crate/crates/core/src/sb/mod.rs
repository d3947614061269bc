//! Standard bases of submodules of free modules over the localized
//! polynomial ring, colengths, Fitting ideals and module products.

mod coeff;
mod engine;

pub use engine::Budget;

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ring::{CoefficientField, Monomial, Polynomial, Rational, RingSpec};
use coeff::{Coeff, ModP};
use engine::{staircase, Elem, Engine, Exp, Term};

/// Submodule of O^rank given by generator columns, taken modulo
/// `relations * O^rank`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubmoduleOfFree {
    pub ring: RingSpec,
    pub rank: usize,
    pub gens: Vec<Vec<Polynomial>>,
    pub relations: Vec<Polynomial>,
}

impl SubmoduleOfFree {
    pub fn new(
        ring: RingSpec,
        rank: usize,
        gens: Vec<Vec<Polynomial>>,
        relations: Vec<Polynomial>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidInput("free module rank must be at least 1".into()));
        }
        let n = ring.nvars();
        for col in &gens {
            if col.len() != rank {
                return Err(Error::InvalidInput(format!(
                    "generator has {} entries, expected {rank}",
                    col.len()
                )));
            }
        }
        if gens.iter().flatten().chain(&relations).any(|p| p.nvars() != n) {
            return Err(Error::InvalidInput("polynomial does not belong to the ring".into()));
        }
        Ok(SubmoduleOfFree { ring, rank, gens, relations })
    }

    pub fn ideal(ring: RingSpec, gens: Vec<Polynomial>, relations: Vec<Polynomial>) -> Result<Self> {
        Self::new(ring, 1, gens.into_iter().map(|g| vec![g]).collect(), relations)
    }

    /// The free module itself.
    pub fn identity(ring: RingSpec, rank: usize, relations: Vec<Polynomial>) -> Result<Self> {
        let n = ring.nvars();
        let gens = (0..rank)
            .map(|j| {
                (0..rank)
                    .map(|i| if i == j { Polynomial::one(n) } else { Polynomial::zero(n) })
                    .collect()
            })
            .collect();
        Self::new(ring, rank, gens, relations)
    }

    /// Maximal ideal of the ring, modulo `relations`.
    pub fn maximal_ideal(ring: RingSpec, relations: Vec<Polynomial>) -> Result<Self> {
        let n = ring.nvars();
        Self::ideal(ring, (0..n).map(|i| Polynomial::var(n, i)).collect(), relations)
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn is_ideal(&self) -> bool {
        self.rank == 1
    }

    /// Generators of a rank-1 module as polynomials.
    pub fn ideal_gens(&self) -> Vec<Polynomial> {
        self.gens.iter().map(|c| c[0].clone()).collect()
    }

    pub fn with_gens(&self, gens: Vec<Vec<Polynomial>>) -> Self {
        SubmoduleOfFree { gens, ..self.clone() }
    }

    /// Apply a map to every polynomial (generators and relations).
    pub fn map_polys(&self, ring: RingSpec, f: impl Fn(&Polynomial) -> Polynomial) -> Result<Self> {
        let gens = self.gens.iter().map(|c| c.iter().map(&f).collect()).collect();
        let relations = self.relations.iter().map(&f).collect();
        Self::new(ring, self.rank, gens, relations)
    }

    /// Append the ideal generators `extra` to a rank-1 module.
    pub fn plus_ideal(&self, extra: &[Polynomial]) -> Self {
        assert_eq!(self.rank, 1);
        let mut gens = self.gens.clone();
        gens.extend(extra.iter().map(|p| vec![p.clone()]));
        self.with_gens(gens)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Colength {
    Finite(u64),
    Infinite,
}

impl Colength {
    pub fn finite(self) -> Option<u64> {
        match self {
            Colength::Finite(n) => Some(n),
            Colength::Infinite => None,
        }
    }
}

impl fmt::Display for Colength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Colength::Finite(n) => write!(f, "{n}"),
            Colength::Infinite => write!(f, "INFINITE"),
        }
    }
}

enum Inner {
    Q(Engine<BigInt>),
    P(Engine<ModP>),
}

pub struct StandardBasis {
    pub ring: RingSpec,
    pub rank: usize,
    /// Basis columns, coefficients scaled to integers (or residues).
    pub elements: Vec<Vec<Polynomial>>,
    /// Leading terms (position, monomial) of the elements.
    pub leading_module: Vec<(usize, Monomial)>,
    inner: Inner,
}

impl fmt::Debug for StandardBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StandardBasis")
            .field("rank", &self.rank)
            .field("leading_module", &self.leading_module)
            .finish()
    }
}

fn to_elem<C: Coeff>(col: &[Polynomial], cx: C::Ctx) -> Result<Elem<C>> {
    let mut raw = Vec::new();
    for (pos, p) in col.iter().enumerate() {
        for (m, c) in p.terms() {
            raw.push((pos as u32, Exp::from_slice(&m.0)?, c.clone()));
        }
    }
    let cs: Vec<Rational> = raw.iter().map(|t| t.2.clone()).collect();
    let cs = C::from_rationals(&cs, cx)?;
    let terms = raw.into_iter().zip(cs).map(|((pos, m, _), c)| Term { pos, m, c }).collect();
    Ok(Elem::new(terms, cx))
}

trait ToRational {
    fn to_rational(&self) -> Rational;
}

impl ToRational for BigInt {
    fn to_rational(&self) -> Rational {
        Rational::from_integer(self.clone())
    }
}

impl ToRational for ModP {
    fn to_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.0))
    }
}

fn from_elem<C: Coeff + ToRational>(e: &Elem<C>, rank: usize, nvars: usize) -> Vec<Polynomial> {
    let mut col = vec![Polynomial::zero(nvars); rank];
    for t in &e.terms {
        let p = Polynomial::term(Monomial(t.m.to_vec(nvars)), t.c.to_rational());
        col[t.pos as usize] = &col[t.pos as usize] + &p;
    }
    col
}

fn input_elems<C: Coeff>(m: &SubmoduleOfFree, cx: C::Ctx) -> Result<Vec<Elem<C>>> {
    let mut out = Vec::new();
    for col in &m.gens {
        out.push(to_elem(col, cx)?);
    }
    let n = m.nvars();
    for r in &m.relations {
        for i in 0..m.rank {
            let mut col = vec![Polynomial::zero(n); m.rank];
            col[i] = r.clone();
            out.push(to_elem(&col, cx)?);
        }
    }
    Ok(out)
}

fn run_engine<C: Coeff + ToRational>(
    m: &SubmoduleOfFree,
    cx: C::Ctx,
    budget: Budget,
) -> Result<(Engine<C>, Vec<Vec<Polynomial>>, Vec<(usize, Monomial)>)> {
    let n = m.nvars();
    let mut eng = Engine::new(cx, m.rank as u32, n, budget);
    eng.run(input_elems(m, cx)?)?;
    let elements = eng.basis.iter().map(|e| from_elem(e, m.rank, n)).collect();
    let leads = eng
        .leads()
        .into_iter()
        .map(|(p, e)| (p as usize, Monomial(e.to_vec(n))))
        .collect();
    Ok((eng, elements, leads))
}

pub fn standard_basis(m: &SubmoduleOfFree) -> Result<StandardBasis> {
    standard_basis_with(m, Budget::default())
}

pub fn standard_basis_with(m: &SubmoduleOfFree, budget: Budget) -> Result<StandardBasis> {
    let (inner, elements, leading_module) = match m.ring.coefficient_field {
        CoefficientField::Rationals => {
            let (e, el, l) = run_engine::<BigInt>(m, (), budget)?;
            (Inner::Q(e), el, l)
        }
        CoefficientField::Prime(p) => {
            let (e, el, l) = run_engine::<ModP>(m, p, budget)?;
            (Inner::P(e), el, l)
        }
    };
    Ok(StandardBasis { ring: m.ring.clone(), rank: m.rank, elements, leading_module, inner })
}

fn nf_zero<C: Coeff>(eng: &mut Engine<C>, col: &[Polynomial]) -> Result<bool> {
    let e = to_elem(col, eng.cx)?;
    Ok(eng.normal_form(e)?.is_zero())
}

fn all_spolys_vanish<C: Coeff>(eng: &mut Engine<C>) -> Result<bool> {
    let n = eng.basis.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (eng.basis[i].lead().clone(), eng.basis[j].lead().clone());
            if a.pos != b.pos {
                continue;
            }
            let l = a.m.lcm(&b.m);
            let mut s = eng.basis[i].clone();
            // s-vector built through a normal-form step of the lcm multiple
            s.terms.iter_mut().for_each(|t| t.m = t.m.mul(&l.div(&a.m)));
            let mut gj = eng.basis[j].clone();
            gj.terms.iter_mut().for_each(|t| t.m = t.m.mul(&l.div(&b.m)));
            let (u, v) = C::cancel(&s.lead().c, &gj.lead().c, eng.cx);
            let mut terms: Vec<Term<C>> = s
                .terms
                .iter()
                .map(|t| Term { pos: t.pos, m: t.m, c: t.c.mul(&u, eng.cx) })
                .collect();
            terms.extend(gj.terms.iter().map(|t| Term {
                pos: t.pos,
                m: t.m,
                c: t.c.mul(&v, eng.cx).neg(eng.cx),
            }));
            let h = Elem::new(terms, eng.cx);
            if !eng.normal_form(h)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl StandardBasis {
    pub fn colength(&self) -> Result<Colength> {
        let leads: Vec<(u32, Exp)> = self
            .leading_module
            .iter()
            .map(|(p, m)| Ok((*p as u32, Exp::from_slice(&m.0)?)))
            .collect::<Result<_>>()?;
        match staircase(&leads, self.rank as u32, self.ring.nvars(), 50_000_000)? {
            Some(st) => Ok(Colength::Finite(st.len() as u64)),
            None => Ok(Colength::Infinite),
        }
    }

    /// Whether a column lies in the module (its normal form vanishes).
    pub fn contains(&mut self, col: &[Polynomial]) -> Result<bool> {
        if col.len() != self.rank {
            return Err(Error::InvalidInput("column has the wrong length".into()));
        }
        match &mut self.inner {
            Inner::Q(e) => nf_zero(e, col),
            Inner::P(e) => nf_zero(e, col),
        }
    }

    /// Direct check of the Buchberger-type criterion: every s-vector of a
    /// pair of basis elements has normal form 0.
    pub fn verify(&mut self) -> Result<bool> {
        match &mut self.inner {
            Inner::Q(e) => all_spolys_vanish(e),
            Inner::P(e) => all_spolys_vanish(e),
        }
    }

    /// Degree above which every monomial lies in the module, if known.
    pub fn highest_corner_degree(&self) -> Option<u32> {
        match &self.inner {
            Inner::Q(e) => e.trunc,
            Inner::P(e) => e.trunc,
        }
    }
}

pub fn colength(m: &SubmoduleOfFree) -> Result<Colength> {
    colength_with(m, Budget::default())
}

pub fn colength_with(m: &SubmoduleOfFree, budget: Budget) -> Result<Colength> {
    standard_basis_with(m, budget)?.colength()
}

/// Determinants of all `size x size` minors with the given row set, one per
/// column subset in lexicographic order.
pub fn minors(matrix: &[Vec<Polynomial>], rows: &[usize], size: usize, nvars: usize) -> Vec<Polynomial> {
    let ncols = matrix.first().map_or(0, Vec::len);
    assert_eq!(rows.len(), size);
    let mut memo = std::collections::HashMap::new();
    let mut out = Vec::new();
    for cols in combinations(ncols, size) {
        let mask = cols.iter().fold(0u64, |m, &c| m | 1 << c);
        out.push(det_rec(matrix, rows, 0, mask, nvars, &mut memo));
    }
    out
}

fn det_rec(
    a: &[Vec<Polynomial>],
    rows: &[usize],
    r: usize,
    mask: u64,
    nvars: usize,
    memo: &mut std::collections::HashMap<(usize, u64), Polynomial>,
) -> Polynomial {
    if r == rows.len() {
        return Polynomial::one(nvars);
    }
    if let Some(p) = memo.get(&(r, mask)) {
        return p.clone();
    }
    let mut acc = Polynomial::zero(nvars);
    let mut sign = true;
    for c in 0..64 {
        if mask & 1 << c == 0 {
            continue;
        }
        let entry = &a[rows[r]][c];
        if !entry.is_zero() {
            let sub = det_rec(a, rows, r + 1, mask & !(1 << c), nvars, memo);
            let t = entry * &sub;
            acc = if sign { &acc + &t } else { &acc - &t };
        }
        sign = !sign;
    }
    memo.insert((r, mask), acc.clone());
    acc
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Zeroth Fitting ideal: all maximal (rank x rank) minors of the generator
/// matrix. Fewer generators than the rank give the zero ideal.
pub fn fitting_ideal_0(m: &SubmoduleOfFree) -> SubmoduleOfFree {
    let n = m.nvars();
    let p = m.rank;
    let gens = if m.gens.len() < p {
        Vec::new()
    } else {
        let rows: Vec<Vec<Polynomial>> =
            (0..p).map(|i| m.gens.iter().map(|c| c[i].clone()).collect()).collect();
        let idx: Vec<usize> = (0..p).collect();
        minors(&rows, &idx, p, n).into_iter().filter(|d| !d.is_zero()).map(|d| vec![d]).collect()
    };
    SubmoduleOfFree { ring: m.ring.clone(), rank: 1, gens, relations: m.relations.clone() }
}

/// Products (generator of `ideal`) * (column of `m`).
pub fn scale_module(ideal: &SubmoduleOfFree, m: &SubmoduleOfFree) -> Result<SubmoduleOfFree> {
    if ideal.rank != 1 || ideal.nvars() != m.nvars() {
        return Err(Error::InvalidInput("scale_module needs an ideal of the same ring".into()));
    }
    let mut gens = Vec::new();
    for g in ideal.ideal_gens() {
        for col in &m.gens {
            let c: Vec<Polynomial> = col.iter().map(|e| &g * e).collect();
            if c.iter().any(|e| !e.is_zero()) {
                gens.push(c);
            }
        }
    }
    Ok(m.with_gens(gens))
}
