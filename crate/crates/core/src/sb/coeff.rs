//! Coefficient domains for the engine: fraction-free integers (for Q) and
//! a word-sized prime field.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ring::Rational;

pub(crate) trait Coeff: Clone + Debug + PartialEq + Send + Sync {
    type Ctx: Copy + Send + Sync;

    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self, cx: Self::Ctx) -> Self;
    fn mul(&self, o: &Self, cx: Self::Ctx) -> Self;
    fn neg(&self, cx: Self::Ctx) -> Self;
    /// Multipliers `(u, v)` with `u*a == v*b`, used as `u*h - v*x^α*g`.
    fn cancel(a: &Self, b: &Self, cx: Self::Ctx) -> (Self, Self);
    /// Rescale a coefficient vector to its canonical associate.
    fn normalize(cs: &mut [&mut Self], cx: Self::Ctx);
    /// Map a row of rationals into the domain (common scaling allowed).
    fn from_rationals(cs: &[Rational], cx: Self::Ctx) -> Result<Vec<Self>>;
}

impl Coeff for BigInt {
    type Ctx = ();

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self, _: ()) -> Self {
        self + o
    }
    fn mul(&self, o: &Self, _: ()) -> Self {
        self * o
    }
    fn neg(&self, _: ()) -> Self {
        -self
    }
    fn cancel(a: &Self, b: &Self, _: ()) -> (Self, Self) {
        let g = a.gcd(b);
        (b / &g, a / &g)
    }
    fn normalize(cs: &mut [&mut Self], _: ()) {
        let mut g = BigInt::zero();
        for c in cs.iter() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        let flip = cs.first().is_some_and(|c| c.is_negative());
        if Zero::is_zero(&g) || (g.is_one() && !flip) {
            return;
        }
        if flip {
            g = -g;
        }
        for c in cs.iter_mut() {
            **c = &**c / &g;
        }
    }
    fn from_rationals(cs: &[Rational], _: ()) -> Result<Vec<Self>> {
        let mut l = BigInt::one();
        for c in cs {
            l = l.lcm(c.denom());
        }
        Ok(cs.iter().map(|c| c.numer() * (&l / c.denom())).collect())
    }
}

/// Element of Z/p for a prime p < 2^62.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ModP(pub u64);

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv(a: u64, p: u64) -> u64 {
    let (mut r, mut b, mut e) = (1u64, a, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

fn reduce_int(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.try_into().unwrap()
}

impl Coeff for ModP {
    type Ctx = u64;

    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, o: &Self, p: u64) -> Self {
        let s = self.0 + o.0;
        ModP(if s >= p { s - p } else { s })
    }
    fn mul(&self, o: &Self, p: u64) -> Self {
        ModP(mulmod(self.0, o.0, p))
    }
    fn neg(&self, p: u64) -> Self {
        ModP(if self.0 == 0 { 0 } else { p - self.0 })
    }
    fn cancel(a: &Self, b: &Self, p: u64) -> (Self, Self) {
        (ModP(1), ModP(mulmod(a.0, inv(b.0, p), p)))
    }
    fn normalize(cs: &mut [&mut Self], p: u64) {
        if let Some(first) = cs.first() {
            if first.0 == 1 || first.0 == 0 {
                return;
            }
            let i = inv(first.0, p);
            for c in cs.iter_mut() {
                c.0 = mulmod(c.0, i, p);
            }
        }
    }
    fn from_rationals(cs: &[Rational], p: u64) -> Result<Vec<Self>> {
        cs.iter()
            .map(|c| {
                let d = reduce_int(c.denom(), p);
                if d == 0 {
                    return Err(Error::BadReduction(c.to_string()));
                }
                Ok(ModP(mulmod(reduce_int(c.numer(), p), inv(d, p), p)))
            })
            .collect()
    }
}
