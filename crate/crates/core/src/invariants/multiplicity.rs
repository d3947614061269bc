//! Samuel, Buchsbaum-Rim and associated multiplicities, Segre numbers.

use rand_chacha::ChaCha8Rng;

use super::genericity::{rand_coeff, stable_min, stream, GenericityConfig, MultiplicityResult};
use crate::error::{Error, Result};
use crate::family::FiberGerm;
use crate::ring::Polynomial;
use crate::sb::{colength_with, fitting_ideal_0, Colength, SubmoduleOfFree};

pub(crate) fn random_combination(
    cols: &[Vec<Polynomial>],
    rows: usize,
    nvars: usize,
    rng: &mut ChaCha8Rng,
    bound: i64,
) -> Vec<Polynomial> {
    let mut acc = vec![Polynomial::zero(nvars); rows];
    for col in cols {
        let c = rand_coeff(rng, bound);
        for (a, e) in acc.iter_mut().zip(col) {
            *a = &*a + &e.scale(&c);
        }
    }
    acc
}

pub(crate) fn reduction_with(m: &SubmoduleOfFree, r: usize, rng: &mut ChaCha8Rng, bound: i64) -> SubmoduleOfFree {
    if m.gens.is_empty() {
        return m.clone();
    }
    let gens = (0..r)
        .map(|_| random_combination(&m.gens, m.rank, m.nvars(), rng, bound))
        .collect();
    m.with_gens(gens)
}

/// `r` random integer combinations of the generators of `m`.
pub fn generic_reduction(m: &SubmoduleOfFree, r: usize, cfg: &GenericityConfig) -> Result<SubmoduleOfFree> {
    if r == 0 {
        return Err(Error::InvalidInput("a reduction needs at least one generator".into()));
    }
    let mut rng = stream(cfg.seed, "generic_reduction", 0);
    Ok(reduction_with(m, r, &mut rng, cfg.coefficient_bound))
}

/// Colength of the ideal `gens` on the germ. On a branch fiber this is the
/// generic rank over the line parameter, restricted to where `cosupport`
/// vanishes.
pub(crate) fn germ_colength(
    germ: &FiberGerm,
    gens: &[Polynomial],
    cosupport: &[Polynomial],
    cfg: &GenericityConfig,
) -> Result<Colength> {
    let ideal = |extra: &[Polynomial]| {
        let mut g = gens.to_vec();
        g.extend_from_slice(extra);
        SubmoduleOfFree::ideal(germ.ring.clone(), g, germ.equations.clone())
    };
    let Some(s) = germ.line_param else {
        return colength_with(&ideal(&[])?, cfg.budget);
    };
    branch_rank(germ, s, &ideal, cosupport, cfg)
}

fn products(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    let mut out: Vec<Polynomial> = Vec::new();
    for x in a {
        for y in b {
            let p = (x * y).primitive();
            if !p.is_zero() && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Rank over C{s} of O/(I + K^N), read off from the stabilized differences
/// of colength(I + K^N + s^n); N is chosen so that K^N lies in I on the
/// special fiber (plus one for margin).
fn branch_rank(
    germ: &FiberGerm,
    s: usize,
    ideal: &dyn Fn(&[Polynomial]) -> Result<SubmoduleOfFree>,
    cosupport: &[Polynomial],
    cfg: &GenericityConfig,
) -> Result<Colength> {
    let n = germ.nvars();
    let sv = Polynomial::var(n, s);
    let with = |extra: &[Polynomial], k: u32| -> Result<Colength> {
        let mut e = extra.to_vec();
        e.push(sv.pow(k));
        colength_with(&ideal(&e)?, cfg.budget)
    };
    let special = with(&[], 1)?;
    if special == Colength::Infinite {
        return Ok(Colength::Infinite);
    }
    let mut kn = cosupport.to_vec();
    let mut reached = false;
    for _ in 0..12 {
        if with(&kn, 1)? == special {
            reached = true;
            break;
        }
        kn = products(&kn, cosupport);
    }
    if !reached {
        return Err(Error::ResourceLimit("cosupport power did not stabilize on the special fiber".into()));
    }
    kn = products(&kn, cosupport);
    let mut prev = with(&kn, 1)?.finite().unwrap_or(0);
    let mut deltas: Vec<u64> = Vec::new();
    for k in 2..=cfg.budget.degree_bound {
        let cur = with(&kn, k)?;
        let Colength::Finite(cur) = cur else {
            return Ok(Colength::Infinite);
        };
        deltas.push(cur - prev);
        prev = cur;
        if deltas.len() >= 3 && deltas[deltas.len() - 3..].windows(2).all(|w| w[0] == w[1]) {
            return Ok(Colength::Finite(*deltas.last().unwrap()));
        }
    }
    Err(Error::ResourceLimit("rank over the line parameter did not stabilize".into()))
}

/// Samuel multiplicity of an ideal on the germ: colength of d generic
/// combinations of its generators, d the dimension of the germ.
pub fn samuel_multiplicity(
    ideal: &SubmoduleOfFree,
    germ: &FiberGerm,
    cfg: &GenericityConfig,
) -> Result<MultiplicityResult> {
    if !ideal.is_ideal() {
        return Err(Error::InvalidInput("samuel_multiplicity takes an ideal".into()));
    }
    let d = germ.d();
    let gens = ideal.ideal_gens();
    let n = germ.nvars();
    stable_min(cfg, "samuel", |rng| {
        let combos: Vec<Polynomial> = (0..d)
            .map(|_| {
                let cols: Vec<Vec<Polynomial>> = gens.iter().map(|g| vec![g.clone()]).collect();
                random_combination(&cols, 1, n, rng, cfg.coefficient_bound).remove(0)
            })
            .collect();
        Ok(germ_colength(germ, &combos, &gens, cfg)?.finite())
    })
}

/// Buchsbaum-Rim multiplicity: colength of the zeroth Fitting ideal of a
/// generic reduction with d + p - 1 generators.
pub fn br_multiplicity(m: &SubmoduleOfFree, germ: &FiberGerm, cfg: &GenericityConfig) -> Result<MultiplicityResult> {
    br_tagged(m, germ, cfg, "br", &cosupport_of(m))
}

pub(crate) fn cosupport_of(m: &SubmoduleOfFree) -> Vec<Polynomial> {
    fitting_ideal_0(m).ideal_gens()
}

fn br_tagged(
    m: &SubmoduleOfFree,
    germ: &FiberGerm,
    cfg: &GenericityConfig,
    tag: &str,
    cosupport: &[Polynomial],
) -> Result<MultiplicityResult> {
    let r = germ.d() + m.rank - 1;
    stable_min(cfg, tag, |rng| {
        let red = reduction_with(m, r, rng, cfg.coefficient_bound);
        let fitt = fitting_ideal_0(&red).ideal_gens();
        Ok(germ_colength(germ, &fitt, cosupport, cfg)?.finite())
    })
}

/// e^0, ..., e^(p-1): e^j is e^0 of the image of M in a generic quotient of
/// E by j constant sections, i.e. of Λ M for a random (p-j) x p matrix Λ.
pub fn associated_multiplicities(
    m: &SubmoduleOfFree,
    germ: &FiberGerm,
    cfg: &GenericityConfig,
) -> Vec<Result<MultiplicityResult>> {
    let p = m.rank;
    let cosupport = cosupport_of(m);
    (0..p)
        .map(|j| {
            if j == 0 {
                return br_tagged(m, germ, cfg, "assoc/0", &cosupport);
            }
            let rows = p - j;
            let r = germ.d() + rows - 1;
            stable_min(cfg, &format!("assoc/{j}"), |rng| {
                let lambda: Vec<Vec<_>> = (0..rows)
                    .map(|_| (0..p).map(|_| rand_coeff(rng, cfg.coefficient_bound)).collect())
                    .collect();
                let gens = m
                    .gens
                    .iter()
                    .map(|col| {
                        lambda
                            .iter()
                            .map(|row| {
                                row.iter().zip(col).fold(Polynomial::zero(m.nvars()), |acc, (c, e)| {
                                    &acc + &e.scale(c)
                                })
                            })
                            .collect()
                    })
                    .collect();
                let stage = SubmoduleOfFree::new(m.ring.clone(), rows, gens, m.relations.clone())?;
                let red = reduction_with(&stage, r, rng, cfg.coefficient_bound);
                let fitt = fitting_ideal_0(&red).ideal_gens();
                Ok(germ_colength(germ, &fitt, &cosupport, cfg)?.finite())
            })
        })
        .collect()
}

/// Segre numbers (s^d, ..., s^r), r = d + p - 1, from s^i = e^(r-i) - e^(r-i+1)
/// with e^j = 0 for j >= p.
pub fn segre_numbers(e: &[u64], d: usize, p: usize) -> Result<Vec<u64>> {
    if e.len() != p {
        return Err(Error::InvalidInput(format!("expected {p} associated multiplicities")));
    }
    let r = d + p - 1;
    let get = |j: usize| if j < p { e[j] as i128 } else { 0 };
    (d..=r)
        .map(|i| {
            let v = get(r - i) - get(r - i + 1);
            u64::try_from(v).map_err(|_| Error::NegativeSegre { index: i })
        })
        .collect()
}
