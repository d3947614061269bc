//! Families of complete-intersection germs over a parameter space, their
//! fibers and Jacobian modules.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ring::{Polynomial, Rational, RingSpec};
use crate::sb::SubmoduleOfFree;

/// Where the singular locus of the family sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Locus {
    /// Y = {z = 0} lies in X: every fiber is a germ at the origin.
    #[default]
    Section,
    /// The singular locus meets Y only at 0 (it may be curved and ramify
    /// over Y). A fiber at y0 != 0 stands for the sum over the points of the
    /// locus that tend to 0 along the line through 0 and y0.
    Branches,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GermFamily {
    pub ring: RingSpec,
    /// Defining equations F of X.
    pub equations: Vec<Polynomial>,
    /// Optional function f defining Z = f^-1(0) in X.
    pub function: Option<Polynomial>,
    pub locus: Locus,
}

impl GermFamily {
    pub fn new(
        ring: RingSpec,
        equations: Vec<Polynomial>,
        function: Option<Polynomial>,
        locus: Locus,
    ) -> Result<Self> {
        let fam = GermFamily { ring, equations, function, locus };
        fam.validate()?;
        Ok(fam)
    }

    fn validate(&self) -> Result<()> {
        let n = self.ring.nvars();
        if self.equations.iter().chain(&self.function).any(|p| p.nvars() != n) {
            return Err(Error::InvalidInput("polynomial does not belong to the family ring".into()));
        }
        if self.p() >= self.l() {
            return Err(Error::InvalidInput(format!(
                "codimension p = {} must be smaller than the number of fiber variables l = {}",
                self.p(),
                self.l()
            )));
        }
        let fiber: Vec<usize> = (0..self.l()).collect();
        for (k, g) in self.equations.iter().enumerate() {
            if self.locus == Locus::Section && !g.part_free_of(&fiber).is_zero() {
                return Err(Error::InvalidInput(format!(
                    "equation {} has a pure-parameter term, so Y is not contained in X",
                    k + 1
                )));
            }
            if !g.constant_term().is_zero() {
                return Err(Error::InvalidInput(format!("equation {} does not vanish at 0", k + 1)));
            }
        }
        if let Some(f) = &self.function {
            if !f.constant_term().is_zero() {
                return Err(Error::InvalidInput("f does not vanish at 0".into()));
            }
            if self.locus == Locus::Section && !f.part_free_of(&fiber).is_zero() {
                return Err(Error::InvalidInput(
                    "f has a pure-parameter term, so Y is not contained in Z".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn l(&self) -> usize {
        self.ring.l()
    }
    pub fn m(&self) -> usize {
        self.ring.m()
    }
    pub fn p(&self) -> usize {
        self.equations.len()
    }
    /// Fiber dimension l - p.
    pub fn d(&self) -> usize {
        self.l() - self.p()
    }
    /// d + p - 1
    pub fn r(&self) -> usize {
        self.d() + self.p() - 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberGerm {
    /// Parameter values of the fiber.
    pub point: Vec<Rational>,
    /// Fiber variables, plus a trailing line parameter for a branch fiber.
    pub ring: RingSpec,
    pub equations: Vec<Polynomial>,
    pub function: Option<Polynomial>,
    /// Index of the line parameter `s` when the fiber is a branch fiber.
    pub line_param: Option<usize>,
}

impl FiberGerm {
    /// A germ at 0 of C^l cut out by `equations`, outside of any family.
    pub fn standalone(ring: RingSpec, equations: Vec<Polynomial>, function: Option<Polynomial>) -> Self {
        FiberGerm { point: Vec::new(), ring, equations, function, line_param: None }
    }

    pub fn l(&self) -> usize {
        self.ring.nvars() - usize::from(self.line_param.is_some())
    }
    pub fn p(&self) -> usize {
        self.equations.len()
    }
    pub fn d(&self) -> usize {
        self.l() - self.p()
    }
    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }
    pub fn is_branch(&self) -> bool {
        self.line_param.is_some()
    }

    /// The maximal ideal of the fiber, modulo its equations.
    pub fn maximal_ideal(&self) -> SubmoduleOfFree {
        let n = self.nvars();
        SubmoduleOfFree::ideal(
            self.ring.clone(),
            (0..self.l()).map(|i| Polynomial::var(n, i)).collect(),
            self.equations.clone(),
        )
        .expect("ring-consistent")
    }
}

/// Substitute parameter values. In a branch family a nonzero point y0 gives
/// the fiber over the line y = y0 * s, with `s` as an extra local variable.
pub fn specialize(family: &GermFamily, values: &[Rational]) -> Result<FiberGerm> {
    if values.len() != family.m() {
        return Err(Error::InvalidInput(format!(
            "expected {} parameter values, got {}",
            family.m(),
            values.len()
        )));
    }
    let l = family.l();
    let branch = family.locus == Locus::Branches && values.iter().any(|v| !v.is_zero());
    if !branch {
        let vals: Vec<(usize, Rational)> =
            values.iter().enumerate().map(|(i, v)| (l + i, v.clone())).collect();
        let sp = |p: &Polynomial| p.specialize(&vals);
        return Ok(FiberGerm {
            point: values.to_vec(),
            ring: family.ring.fiber_ring(),
            equations: family.equations.iter().map(sp).collect(),
            function: family.function.as_ref().map(sp),
            line_param: None,
        });
    }
    let mut ring = family.ring.fiber_ring();
    let mut s_name = "s".to_string();
    while ring.var_index(&s_name).is_some() {
        s_name.push('_');
    }
    ring.fiber_vars.push(s_name);
    let n = l + 1;
    let images: Vec<Polynomial> = (0..l)
        .map(|i| Polynomial::var(n, i))
        .chain(values.iter().map(|v| Polynomial::var(n, l).scale(v)))
        .collect();
    let sub = |p: &Polynomial| p.substitute(&images);
    Ok(FiberGerm {
        point: values.to_vec(),
        ring,
        equations: family.equations.iter().map(sub).collect(),
        function: family.function.as_ref().map(sub),
        line_param: Some(l),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobianKind {
    /// All partials.
    Absolute,
    /// Partials along the fiber variables.
    Relative,
    /// Partials along the parameter variables.
    Param,
    Augmented,
    AugmentedRelative,
    AugmentedParam,
}

impl JacobianKind {
    pub fn augmented(self) -> bool {
        matches!(self, Self::Augmented | Self::AugmentedRelative | Self::AugmentedParam)
    }
}

/// Anything with equations, an optional function and a split variable set.
pub trait JacobianSource {
    fn ring(&self) -> &RingSpec;
    fn equations(&self) -> &[Polynomial];
    fn function(&self) -> Option<&Polynomial>;
    /// Variable indices for each kind of partial derivative.
    fn partial_vars(&self, kind: JacobianKind) -> Result<Vec<usize>>;
}

impl JacobianSource for GermFamily {
    fn ring(&self) -> &RingSpec {
        &self.ring
    }
    fn equations(&self) -> &[Polynomial] {
        &self.equations
    }
    fn function(&self) -> Option<&Polynomial> {
        self.function.as_ref()
    }
    fn partial_vars(&self, kind: JacobianKind) -> Result<Vec<usize>> {
        let (l, n) = (self.l(), self.ring.nvars());
        Ok(match kind {
            JacobianKind::Absolute | JacobianKind::Augmented => (0..n).collect(),
            JacobianKind::Relative | JacobianKind::AugmentedRelative => (0..l).collect(),
            JacobianKind::Param | JacobianKind::AugmentedParam => (l..n).collect(),
        })
    }
}

impl JacobianSource for FiberGerm {
    fn ring(&self) -> &RingSpec {
        &self.ring
    }
    fn equations(&self) -> &[Polynomial] {
        &self.equations
    }
    fn function(&self) -> Option<&Polynomial> {
        self.function.as_ref()
    }
    fn partial_vars(&self, kind: JacobianKind) -> Result<Vec<usize>> {
        match kind {
            JacobianKind::Param | JacobianKind::AugmentedParam => Err(Error::InvalidInput(
                "parameter partials are not defined on a fiber".into(),
            )),
            _ => Ok((0..self.l()).collect()),
        }
    }
}

/// Generator matrix of partial derivatives: one row per equation (plus the
/// gradient of f at the bottom when augmented), one column per variable.
pub fn jacobian_module<S: JacobianSource>(source: &S, kind: JacobianKind) -> Result<SubmoduleOfFree> {
    let mut rows: Vec<&Polynomial> = source.equations().iter().collect();
    if kind.augmented() {
        rows.push(source.function().ok_or_else(|| {
            Error::InvalidInput("augmented Jacobian needs a function f".into())
        })?);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("Jacobian module of an empty map".into()));
    }
    let vars = source.partial_vars(kind)?;
    let gens = vars
        .iter()
        .map(|&v| rows.iter().map(|g| g.derivative(v)).collect())
        .collect();
    SubmoduleOfFree::new(source.ring().clone(), rows.len(), gens, source.equations().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_polynomial;

    #[test]
    fn rejects_bad_families() {
        let r = RingSpec::from_names("v w", "y").unwrap();
        let p = |s: &str| parse_polynomial(s, &r).unwrap();
        assert!(GermFamily::new(r.clone(), vec![p("w^2 - y")], None, Locus::Section).is_err());
        assert!(GermFamily::new(r.clone(), vec![p("w^2 - y")], None, Locus::Branches).is_ok());
        assert!(GermFamily::new(r.clone(), vec![p("w"), p("v")], None, Locus::Section).is_err());
        assert!(GermFamily::new(r.clone(), vec![], Some(p("1 + v")), Locus::Section).is_err());
    }
}
