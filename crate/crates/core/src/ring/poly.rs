use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Monomial, Rational, RingSpec};

/// Sparse polynomial; the map is ordered ascending in the local order, so
/// the leading (largest) term is the last entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Rational::from_integer(BigInt::from(c)))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_int(nvars, 1)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in it {
            assert_eq!(m.nvars(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in decreasing local order (leading term first).
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Largest total degree of a term; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Smallest total degree of a term (the order at 0); `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.leading().map(|(m, _)| m.degree())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Polynomial::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            out.add_term(m2, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// True if every variable outside `vars` is absent.
    pub fn only_in(&self, vars: &[usize]) -> bool {
        self.terms
            .keys()
            .all(|m| m.0.iter().enumerate().all(|(i, &e)| e == 0 || vars.contains(&i)))
    }

    /// Sum of the terms whose exponents vanish in all of `vars`.
    pub fn part_free_of(&self, vars: &[usize]) -> Self {
        Polynomial::from_terms(
            self.nvars,
            self.terms
                .iter()
                .filter(|(m, _)| vars.iter().all(|&v| m.0[v] == 0))
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Drop all terms of total degree above `deg`.
    pub fn truncate_degree(&self, deg: u32) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= deg)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Compose with polynomial images of every variable (exact).
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars, "substitution arity");
        let target = images.first().map_or(0, Polynomial::nvars);
        substitute_generic(self, images, Polynomial::zero(target), Polynomial::one(target))
    }

    /// Re-embed into a ring with `nvars` variables; `map[i]` is the new index
    /// of variable i. Panics if a used variable is unmapped.
    pub fn remap(&self, nvars: usize, map: &[Option<usize>]) -> Polynomial {
        let mut out = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    e[map[i].expect("remap drops a used variable")] += k;
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Evaluate the variables in `vals` (index, value) and drop them from
    /// the ring, keeping the others in their relative order.
    pub fn specialize(&self, vals: &[(usize, Rational)]) -> Polynomial {
        let fixed: Vec<usize> = vals.iter().map(|(i, _)| *i).collect();
        let keep: Vec<usize> = (0..self.nvars).filter(|i| !fixed.contains(i)).collect();
        let mut out = Polynomial::zero(keep.len());
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            for (i, v) in vals {
                let e = m.0[*i];
                if e > 0 {
                    coef *= num_traits::pow(v.clone(), e as usize);
                }
            }
            let e = keep.iter().map(|&i| m.0[i]).collect();
            out.add_term(Monomial(e), coef);
        }
        out
    }

    /// Multiply through by the lcm of denominators and divide by the content,
    /// leading coefficient positive. Generates the same ideal.
    pub fn primitive(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        use num_integer::Integer;
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = l.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(&(c.numer() * (&l / c.denom())));
        }
        let sign = if self.leading().unwrap().1.is_negative() { -1 } else { 1 };
        let f = Rational::new(l * sign, g);
        self.scale(&f)
    }

    pub fn to_string_in(&self, ring: &RingSpec) -> String {
        super::parse::print_polynomial(self, ring)
    }
}

pub(crate) trait SubstTarget: Clone {
    fn add_to(&mut self, other: &Self);
    fn mul_by(&self, other: &Self) -> Self;
    fn scaled(&self, c: &Rational) -> Self;
}

impl SubstTarget for Polynomial {
    fn add_to(&mut self, other: &Self) {
        *self = &*self + other;
    }
    fn mul_by(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, c: &Rational) -> Self {
        self.scale(c)
    }
}

/// Evaluate `p` with variable i replaced by `images[i]`, caching powers.
pub(crate) fn substitute_generic<T: SubstTarget>(
    p: &Polynomial,
    images: &[T],
    zero: T,
    one: T,
) -> T {
    let mut powers: Vec<Vec<T>> = images.iter().map(|_| vec![one.clone()]).collect();
    let mut acc = zero;
    for (m, c) in p.terms.iter() {
        let mut t = one.clone();
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            while powers[i].len() <= e as usize {
                let next = powers[i].last().unwrap().mul_by(&images[i]);
                powers[i].push(next);
            }
            t = t.mul_by(&powers[i][e as usize]);
        }
        acc.add_to(&t.scaled(c));
    }
    acc
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial { (&self).$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);
