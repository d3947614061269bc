use num_traits::Zero;

use super::poly::SubstTarget;
use super::Rational;

/// Univariate power series in `t`, known modulo `t^trunc`. `trunc = None`
/// means the series is an exact polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Rational>,
    trunc: Option<u32>,
}

impl Series {
    pub fn zero(trunc: Option<u32>) -> Self {
        Series { coeffs: Vec::new(), trunc }
    }

    pub fn one(trunc: Option<u32>) -> Self {
        Self::from_coeffs(vec![Rational::from_integer(1.into())], trunc)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>, trunc: Option<u32>) -> Self {
        if let Some(t) = trunc {
            coeffs.truncate(t as usize);
        }
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Series { coeffs, trunc }
    }

    /// `c * t^k`
    pub fn monomial(c: Rational, k: u32, trunc: Option<u32>) -> Self {
        let mut v = vec![Rational::zero(); k as usize + 1];
        v[k as usize] = c;
        Self::from_coeffs(v, trunc)
    }

    pub fn trunc(&self) -> Option<u32> {
        self.trunc
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn with_trunc(&self, trunc: Option<u32>) -> Self {
        let t = match (self.trunc, trunc) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self::from_coeffs(self.coeffs.clone(), t)
    }

    /// True if known to vanish identically (exact zero) or up to truncation.
    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the first nonzero coefficient; `None` if none is known.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| i as u32)
    }

    pub fn add(&self, o: &Series) -> Series {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect();
        Series::from_coeffs(v, min_trunc(self.trunc, o.trunc))
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.scale(&Rational::from_integer((-1).into())))
    }

    pub fn scale(&self, c: &Rational) -> Series {
        Series::from_coeffs(self.coeffs.iter().map(|a| a * c).collect(), self.trunc)
    }

    pub fn mul(&self, o: &Series) -> Series {
        let trunc = min_trunc(self.trunc, o.trunc);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Series::zero(trunc);
        }
        let mut n = self.coeffs.len() + o.coeffs.len() - 1;
        if let Some(t) = trunc {
            n = n.min(t as usize);
        }
        let mut v = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= n {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                v[i + j] += a * b;
            }
        }
        Series::from_coeffs(v, trunc)
    }

    /// Divide by `t^k`; the caller guarantees valuation ≥ k. Precision drops by k.
    pub fn shift_down(&self, k: u32) -> Series {
        let v = self.coeffs.iter().skip(k as usize).cloned().collect();
        Series::from_coeffs(v, self.trunc.map(|t| t.saturating_sub(k)))
    }

    pub fn shift_up(&self, k: u32) -> Series {
        let mut v = vec![Rational::zero(); k as usize];
        v.extend(self.coeffs.iter().cloned());
        Series::from_coeffs(v, self.trunc.map(|t| t + k))
    }
}

fn min_trunc(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

impl SubstTarget for Series {
    fn add_to(&mut self, other: &Self) {
        *self = Series::add(self, other);
    }
    fn mul_by(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn scaled(&self, c: &Rational) -> Self {
        self.scale(c)
    }
}

impl super::Polynomial {
    /// Compose with series images of every variable. The result is known to
    /// the minimum truncation order among the images.
    pub fn substitute_series(&self, images: &[Series]) -> Series {
        assert_eq!(images.len(), self.nvars(), "substitution arity");
        let trunc = images.iter().fold(None, |acc, s| min_trunc(acc, s.trunc()));
        super::poly::substitute_generic(self, images, Series::zero(trunc), Series::one(trunc))
    }
}
