//! Exact multivariate polynomials over the rationals under the local
//! negative-degree reverse-lexicographic order.

mod parse;
mod poly;
mod series;

pub use parse::{parse_polynomial, ParseError};
pub use poly::Polynomial;
pub use series::Series;

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;

use crate::error::Error;

pub type Rational = BigRational;

/// Coefficient field of a ring. `Prime` is an accelerated mode for
/// exploratory runs only; every invariant of interest is characteristic zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum CoefficientField {
    #[default]
    Rationals,
    Prime(u64),
}

impl CoefficientField {
    pub const MIN_PRIME: u64 = 1 << 30;

    pub fn prime(p: u64) -> Result<Self, Error> {
        if p <= Self::MIN_PRIME || p >= 1 << 62 || !is_prime(p) {
            return Err(Error::InvalidInput(format!(
                "prime field characteristic must be a prime in (2^30, 2^62), got {p}"
            )));
        }
        Ok(CoefficientField::Prime(p))
    }
}

impl fmt::Display for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientField::Rationals => write!(f, "qq"),
            CoefficientField::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Variables of C^n = C^l x Y. Fiber variables come first in the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec {
    pub fiber_vars: Vec<String>,
    pub param_vars: Vec<String>,
    pub coefficient_field: CoefficientField,
}

impl RingSpec {
    pub fn new(fiber_vars: Vec<String>, param_vars: Vec<String>) -> Result<Self, Error> {
        let ring = RingSpec {
            fiber_vars,
            param_vars,
            coefficient_field: CoefficientField::Rationals,
        };
        ring.validate()?;
        Ok(ring)
    }

    /// Convenience constructor from whitespace-separated names.
    pub fn from_names(fiber: &str, params: &str) -> Result<Self, Error> {
        let split = |s: &str| s.split_whitespace().map(str::to_string).collect();
        Self::new(split(fiber), split(params))
    }

    pub fn with_field(mut self, field: CoefficientField) -> Self {
        self.coefficient_field = field;
        self
    }

    fn validate(&self) -> Result<(), Error> {
        if self.fiber_vars.is_empty() {
            return Err(Error::InvalidInput("at least one fiber variable is required".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for v in self.var_names() {
            if !is_identifier(v) {
                return Err(Error::InvalidInput(format!("invalid variable name '{v}'")));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidInput(format!("duplicate variable name '{v}'")));
            }
        }
        Ok(())
    }

    pub fn l(&self) -> usize {
        self.fiber_vars.len()
    }

    pub fn m(&self) -> usize {
        self.param_vars.len()
    }

    pub fn nvars(&self) -> usize {
        self.l() + self.m()
    }

    pub fn var_names(&self) -> impl Iterator<Item = &String> {
        self.fiber_vars.iter().chain(self.param_vars.iter())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names().position(|v| v == name)
    }

    pub fn name(&self, i: usize) -> &str {
        if i < self.l() {
            &self.fiber_vars[i]
        } else {
            &self.param_vars[i - self.l()]
        }
    }

    /// The ring of the fiber: same fiber variables, no parameters.
    pub fn fiber_ring(&self) -> RingSpec {
        RingSpec {
            fiber_vars: self.fiber_vars.clone(),
            param_vars: Vec::new(),
            coefficient_field: self.coefficient_field,
        }
    }

    /// A fresh ring with `n` generated fiber variables `prefix1..prefixn`.
    pub fn generated(prefix: &str, n: usize, field: CoefficientField) -> RingSpec {
        RingSpec {
            fiber_vars: (1..=n).map(|i| format!("{prefix}{i}")).collect(),
            param_vars: Vec::new(),
            coefficient_field: field,
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Exponent vector. `Ord` is the local order: `a > b` means `a` is the
/// larger monomial, so 1 is the maximum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// Negative-degree reverse-lex comparison of exponent slices.
pub fn local_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    if da != db {
        return db.cmp(&da);
    }
    for (x, y) in a.iter().zip(b).rev() {
        if x != y {
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        local_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Module order, position over term: a smaller position is larger.
pub fn module_cmp(pa: usize, a: &Monomial, pb: usize, b: &Monomial) -> Ordering {
    pb.cmp(&pa).then_with(|| a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_is_largest() {
        let one = Monomial::one(3);
        for i in 0..3 {
            assert!(one > Monomial::var(3, i));
        }
        // revlex tie-break: the first variable is the largest of degree 1
        assert!(Monomial::var(3, 0) > Monomial::var(3, 1));
        assert!(Monomial::var(3, 1) > Monomial::var(3, 2));
    }

    #[test]
    fn primes() {
        assert!(CoefficientField::prime(1_073_741_827).is_ok());
        assert!(CoefficientField::prime(1_073_741_825).is_err());
        assert!(CoefficientField::prime(101).is_err());
    }

    #[test]
    fn ring_validation() {
        assert!(RingSpec::from_names("x x", "").is_err());
        assert!(RingSpec::from_names("", "y").is_err());
        assert!(RingSpec::from_names("x", "x").is_err());
        assert!(RingSpec::from_names("x 1a", "").is_err());
        assert_eq!(RingSpec::from_names("v w", "y").unwrap().nvars(), 3);
    }
}
