//! Milnor numbers by the Lê-Greuel recursion, sectional Milnor sequences,
//! em and polar multiplicities.

use num_traits::Zero;
use rand_chacha::ChaCha8Rng;

use super::genericity::{rand_coeff, stable_min, GenericityConfig, MultiplicityResult};
use super::multiplicity::{br_multiplicity, samuel_multiplicity};
use crate::error::{Error, Result};
use crate::family::{jacobian_module, FiberGerm, JacobianKind};
use crate::ring::{CoefficientField, Polynomial, Rational, RingSpec};
use crate::sb::{colength_with, minors, scale_module, Budget, Colength, SubmoduleOfFree};

fn require_section(germ: &FiberGerm) -> Result<()> {
    if germ.is_branch() {
        return Err(Error::InvalidInput(
            "this invariant is only defined on fibers through the origin (section locus)".into(),
        ));
    }
    Ok(())
}

/// μ(f) = colength of the Jacobian ideal in all variables of `ring`.
pub fn milnor_hypersurface(f: &Polynomial, ring: &RingSpec, budget: Budget) -> Result<u64> {
    let n = ring.nvars();
    let partials = (0..n).map(|i| f.derivative(i)).collect();
    match colength_with(&SubmoduleOfFree::ideal(ring.clone(), partials, vec![])?, budget)? {
        Colength::Finite(k) => Ok(k),
        Colength::Infinite => Err(Error::NotIsolated),
    }
}

/// Colength of (g_1..g_(k-1)) + k x k minors of D(g_1..g_k): μ(level k) + μ(level k-1).
pub(crate) fn lg_colength(gs: &[Polynomial], ring: &RingSpec, budget: Budget) -> Result<Colength> {
    let n = ring.nvars();
    let k = gs.len();
    let jac: Vec<Vec<Polynomial>> =
        gs.iter().map(|g| (0..n).map(|v| g.derivative(v)).collect()).collect();
    let rows: Vec<usize> = (0..k).collect();
    let mut gens: Vec<Polynomial> = if k > n {
        Vec::new()
    } else {
        minors(&jac, &rows, k, n).into_iter().filter(|p| !p.is_zero()).collect()
    };
    gens.extend(gs[..k - 1].iter().cloned());
    colength_with(&SubmoduleOfFree::ideal(ring.clone(), gens, vec![])?, budget)
}

/// One draw: recombine generically, then run the recursion level by level.
fn icis_draw(fs: &[Polynomial], ring: &RingSpec, rng: &mut ChaCha8Rng, cfg: &GenericityConfig) -> Result<Option<u64>> {
    let k = fs.len();
    let n = ring.nvars();
    let mixed: Vec<Polynomial> = (0..k)
        .map(|_| {
            fs.iter().fold(Polynomial::zero(n), |acc, f| &acc + &f.scale(&rand_coeff(rng, cfg.coefficient_bound)))
        })
        .collect();
    let mut mu = 0u64;
    for level in 1..=k {
        let Colength::Finite(c) = lg_colength(&mixed[..level], ring, cfg.budget)? else {
            return Ok(None);
        };
        mu = c.checked_sub(mu).ok_or_else(|| Error::Internal("negative Milnor number".into()))?;
    }
    Ok(Some(mu))
}

/// Milnor number of the ICIS V(fs) at 0.
pub fn milnor_icis(fs: &[Polynomial], ring: &RingSpec, cfg: &GenericityConfig) -> Result<u64> {
    milnor_icis_result(fs, ring, cfg, "milnor_icis").map(|r| r.value)
}

fn milnor_icis_result(fs: &[Polynomial], ring: &RingSpec, cfg: &GenericityConfig, tag: &str) -> Result<MultiplicityResult> {
    if fs.is_empty() {
        return Ok(MultiplicityResult { value: 0, draws_agreeing: cfg.draws, seed_used: cfg.seed });
    }
    if fs.iter().any(|f| !f.constant_term().is_zero()) {
        return Err(Error::NotIcis("a defining equation does not vanish at 0".into()));
    }
    stable_min(cfg, tag, |rng| icis_draw(fs, ring, rng, cfg)).map_err(|e| match e {
        Error::NotFiniteColength(m) => Error::NotIcis(m),
        e => e,
    })
}

/// Ordinary multiplicity: Samuel multiplicity of the maximal ideal.
pub fn multiplicity(germ: &FiberGerm, cfg: &GenericityConfig) -> Result<MultiplicityResult> {
    require_section(germ)?;
    samuel_multiplicity(&germ.maximal_ideal(), germ, cfg)
}

/// Random linear section: substitution z = A u with A of size l x (l - i).
fn section_images(l: usize, i: usize, rng: &mut ChaCha8Rng, bound: i64) -> Vec<Polynomial> {
    let k = l - i;
    (0..l)
        .map(|_| (0..k).fold(Polynomial::zero(k), |acc, j| &acc + &Polynomial::var(k, j).scale(&rand_coeff(rng, bound))))
        .collect()
}

fn section_mu(fs: &[Polynomial], field: CoefficientField, l: usize, i: usize, cfg: &GenericityConfig, tag: &str) -> Result<u64> {
    let ring = RingSpec::generated("u", l - i, field);
    stable_min(cfg, tag, |rng| {
        let images = section_images(l, i, rng, cfg.coefficient_bound);
        let cut: Vec<Polynomial> = fs.iter().map(|f| f.substitute(&images)).collect();
        icis_draw(&cut, &ring, rng, cfg)
    })
    .map(|r| r.value)
    .map_err(|e| match e {
        Error::NotFiniteColength(m) => Error::NotIcis(m),
        e => e,
    })
}

/// (μ_i(X), μ_i(Z)) for i = 0..=d with the top conventions: μ_d(X) and
/// μ_(d-1)(Z) are multiplicities minus one, μ_d(Z) = 1.
pub fn sectional_milnor_sequence(
    germ: &FiberGerm,
    with_f: bool,
    cfg: &GenericityConfig,
) -> Result<Vec<(u64, Option<u64>)>> {
    require_section(germ)?;
    let (l, d) = (germ.l(), germ.d());
    let f = if with_f {
        Some(germ.function.clone().ok_or_else(|| Error::InvalidInput("sectional sequence of Z needs f".into()))?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(d + 1);
    let mult_x = multiplicity(germ, cfg)?.value;
    let mult_z = match &f {
        Some(f) if d >= 1 => {
            let mut eqs = germ.equations.clone();
            eqs.push(f.clone());
            let z = FiberGerm::standalone(germ.ring.clone(), eqs, None);
            Some(multiplicity(&z, cfg)?.value)
        }
        _ => None,
    };
    for i in 0..=d {
        let mx = if i < d {
            section_mu(&germ.equations, germ.ring.coefficient_field, l, i, cfg, &format!("section/x/{i}"))?
        } else {
            mult_x.checked_sub(1).ok_or_else(|| Error::Internal("multiplicity 0".into()))?
        };
        let mz = match &f {
            None => None,
            Some(_) if i == d => Some(1),
            Some(_) if i + 1 == d => Some(
                mult_z.unwrap().checked_sub(1).ok_or_else(|| Error::Internal("multiplicity 0".into()))?,
            ),
            Some(f) => {
                let mut eqs = germ.equations.clone();
                eqs.push(f.clone());
                Some(section_mu(&eqs, germ.ring.coefficient_field, l, i, cfg, &format!("section/z/{i}"))?)
            }
        };
        out.push((mx, mz));
    }
    Ok(out)
}

/// The augmented fiber Jacobian module JM(F(y); f(y)).
pub fn augmented_fiber_module(germ: &FiberGerm) -> Result<SubmoduleOfFree> {
    jacobian_module(germ, JacobianKind::AugmentedRelative)
}

/// em(y) = e(m · JM(F(y); f(y))), a Buchsbaum-Rim multiplicity of rank p + 1.
pub fn em_invariant(germ: &FiberGerm, cfg: &GenericityConfig) -> Result<MultiplicityResult> {
    require_section(germ)?;
    if germ.p() == 0 {
        return Err(Error::InvalidInput("em needs at least one defining equation".into()));
    }
    let m = augmented_fiber_module(germ)?;
    let scaled = scale_module(&germ.maximal_ideal(), &m)?;
    br_multiplicity(&scaled, germ, cfg)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Σ binom(top, i) (μ_i(X) + μ_i(Z)).
pub fn weighted_milnor_sum(seq: &[(u64, Option<u64>)], top: u64) -> u64 {
    seq.iter()
        .enumerate()
        .map(|(i, (x, z))| binomial(top, i as u64) * (x + z.unwrap_or(0)))
        .sum()
}

/// em through the sectional Milnor numbers, with weights binom(l, i).
pub fn em_via_milnor(germ: &FiberGerm, cfg: &GenericityConfig) -> Result<u64> {
    em_via_milnor_weighted(germ, cfg, germ.l() as u64)
}

/// Same sum with weights binom(top, i).
pub fn em_via_milnor_weighted(germ: &FiberGerm, cfg: &GenericityConfig, top: u64) -> Result<u64> {
    if germ.p() == 0 {
        return Err(Error::InvalidInput("em needs at least one defining equation".into()));
    }
    let seq = sectional_milnor_sequence(germ, true, cfg)?;
    Ok(weighted_milnor_sum(&seq, top))
}

/// Colength of (F) + maximal minors of D(F; f; π) + I(L) for a generic
/// linear π of rank i and a generic linear space L of codimension i.
pub fn polar_multiplicity(germ: &FiberGerm, i: usize, cfg: &GenericityConfig) -> Result<MultiplicityResult> {
    require_section(germ)?;
    let (l, d) = (germ.l(), germ.d());
    if i > d {
        return Err(Error::InvalidInput(format!("polar index {i} exceeds the fiber dimension {d}")));
    }
    let f = germ.function.clone().ok_or_else(|| Error::InvalidInput("polar multiplicity needs f".into()))?;
    let n = germ.nvars();
    let linear = |rng: &mut ChaCha8Rng| {
        (0..l).fold(Polynomial::zero(n), |acc, v| &acc + &Polynomial::var(n, v).scale(&rand_coeff(rng, cfg.coefficient_bound)))
    };
    stable_min(cfg, &format!("polar/{i}"), |rng| {
        let pi: Vec<Polynomial> = (0..i).map(|_| linear(rng)).collect();
        let plane: Vec<Polynomial> = (0..i).map(|_| linear(rng)).collect();
        let mut rows: Vec<&Polynomial> = germ.equations.iter().collect();
        rows.push(&f);
        rows.extend(pi.iter());
        let size = rows.len();
        let mut gens: Vec<Polynomial> = if size > l {
            Vec::new()
        } else {
            let jac: Vec<Vec<Polynomial>> = rows.iter().map(|g| (0..l).map(|v| g.derivative(v)).collect()).collect();
            minors(&jac, &(0..size).collect::<Vec<_>>(), size, n)
        };
        gens.extend(plane);
        let ideal = SubmoduleOfFree::ideal(germ.ring.clone(), gens, germ.equations.clone())?;
        Ok(colength_with(&ideal, cfg.budget)?.finite())
    })
}

/// A rational point as a display string, e.g. "(1, -2)".
pub fn point_label(pt: &[Rational]) -> String {
    let parts: Vec<String> = pt.iter().map(|v| v.to_string()).collect();
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        format!("({})", parts.join(", "))
    }
}
