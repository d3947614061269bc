//! Constancy-based equisingularity checks over sampled parameter values.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{jacobian_module, specialize, FiberGerm, GermFamily, JacobianKind, Locus};
use crate::invariants::{
    associated_multiplicities, augmented_fiber_module, br_multiplicity, em_invariant, em_via_milnor, lg_colength,
    milnor_icis, multiplicity, point_label, sectional_milnor_sequence, stream, GenericityConfig,
};
use crate::ring::{Polynomial, Rational};
use crate::sb::Colength;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    /// Nonzero sample values. For one parameter these are the points; with
    /// several parameters each value s gives the point s·v for a random
    /// direction v.
    pub samples: Vec<Rational>,
    /// Total number of samples; random small rationals fill the gap.
    pub sample_count: usize,
    pub retraction_draws: usize,
    pub genericity: GenericityConfig,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            samples: vec![Rational::from_integer(1.into()), Rational::from_integer((-2).into())],
            sample_count: 2,
            retraction_draws: 3,
            genericity: GenericityConfig::default(),
        }
    }
}

impl CheckConfig {
    pub fn with_seed(seed: u64) -> Self {
        CheckConfig { genericity: GenericityConfig::with_seed(seed), ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.samples.iter().any(num_traits::Zero::is_zero) {
            return Err(Error::InvalidInput("sample values must be nonzero".into()));
        }
        if self.samples.len().max(self.sample_count) < 2 {
            return Err(Error::InvalidInput("at least 2 samples are required".into()));
        }
        if self.retraction_draws == 0 {
            return Err(Error::InvalidInput("at least one retraction is required".into()));
        }
        self.genericity.validate()
    }

    /// Parameter points: the origin first, then the samples.
    pub fn points(&self, m: usize) -> Vec<Vec<Rational>> {
        let mut values = self.samples.clone();
        let mut rng = stream(self.genericity.seed, "samples", 0);
        while values.len() < self.sample_count {
            let num: i64 = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
            let den: i64 = rng.gen_range(1..=4);
            let v = Rational::new(num.into(), den.into());
            if !values.contains(&v) {
                values.push(v);
            }
        }
        let mut out = vec![vec![Rational::from_integer(0.into()); m]];
        for (k, s) in values.iter().enumerate() {
            if m == 1 {
                out.push(vec![s.clone()]);
                continue;
            }
            let mut rng = stream(self.genericity.seed, "direction", k);
            let dir: Vec<i64> = loop {
                let d: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
                if d.iter().any(|&x| x != 0) {
                    break d;
                }
            };
            out.push(dir.iter().map(|&c| s * Rational::from_integer(c.into())).collect());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Certified,
    NotConstant,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Certified => 0,
            Verdict::NotConstant => 1,
            Verdict::Inconclusive => 2,
        }
    }

    /// NOT_CONSTANT dominates, then INCONCLUSIVE.
    pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Certified;
        for v in verdicts {
            match v {
                Verdict::NotConstant => return Verdict::NotConstant,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Certified => {}
            }
        }
        out
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "CERTIFIED",
            Verdict::NotConstant => "NOT_CONSTANT",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Scalar(u64),
    Vector(Vec<u64>),
}

impl Value {
    /// Componentwise `self >= other`.
    fn dominates(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => a >= b,
            (Value::Vector(a), Value::Vector(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x >= y),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(v) => write!(f, "{v}"),
            Value::Vector(v) => {
                let s: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "({})", s.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Value(Value),
    Error(String),
}

impl Outcome {
    pub fn value(&self) -> Option<&Value> {
        match self {
            Outcome::Value(v) => Some(v),
            Outcome::Error(_) => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(v) => write!(f, "{v}"),
            Outcome::Error(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<Result<Value>> for Outcome {
    fn from(r: Result<Value>) -> Self {
        match r {
            Ok(v) => Outcome::Value(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleReading {
    pub point: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstancyReport {
    pub invariant: String,
    pub at_origin: Outcome,
    pub samples: Vec<SampleReading>,
    pub verdict: Verdict,
    pub seed: u64,
    pub notes: Vec<String>,
    /// The invariant is upper semicontinuous, so value(0) >= value(sample)
    /// is expected.
    #[serde(skip)]
    pub semicontinuous: bool,
    #[serde(skip)]
    pub semicontinuity_violated: bool,
}

impl ConstancyReport {
    fn build(invariant: impl Into<String>, points: &[Vec<Rational>], outcomes: Vec<Outcome>, seed: u64, semicontinuous: bool) -> Self {
        let mut it = outcomes.into_iter();
        let at_origin = it.next().expect("origin is always evaluated");
        let samples: Vec<SampleReading> =
            points[1..].iter().zip(it).map(|(p, o)| SampleReading { point: point_label(p), outcome: o }).collect();
        let mut report = ConstancyReport {
            invariant: invariant.into(),
            at_origin,
            samples,
            verdict: Verdict::Inconclusive,
            seed,
            notes: Vec::new(),
            semicontinuous,
            semicontinuity_violated: false,
        };
        report.decide();
        report
    }

    fn decide(&mut self) {
        let Some(origin) = self.at_origin.value().cloned() else {
            self.verdict = Verdict::Inconclusive;
            return;
        };
        let vals: Vec<Option<&Value>> = self.samples.iter().map(|s| s.outcome.value()).collect();
        if self.semicontinuous && vals.iter().flatten().any(|v| !origin.dominates(v)) {
            self.semicontinuity_violated = true;
            self.verdict = Verdict::Inconclusive;
            self.notes.push(
                "internal error: a sample value exceeds the value at the origin, violating semicontinuity".into(),
            );
            return;
        }
        self.verdict = if vals.iter().any(Option::is_none) {
            Verdict::Inconclusive
        } else if vals.iter().all(|v| *v == Some(&origin)) {
            Verdict::Certified
        } else {
            Verdict::NotConstant
        };
    }

    pub fn values(&self) -> impl Iterator<Item = Option<&Value>> {
        std::iter::once(self.at_origin.value()).chain(self.samples.iter().map(|s| s.outcome.value()))
    }
}

/// Reports of one check plus the combined verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    pub reports: Vec<ConstancyReport>,
}

impl CheckOutcome {
    fn from_reports(mut reports: Vec<ConstancyReport>, notes: &[String]) -> Self {
        let verdict = Verdict::combine(reports.iter().map(|r| r.verdict));
        if let Some(first) = reports.first_mut() {
            first.notes.extend(notes.iter().cloned());
        }
        CheckOutcome { verdict, reports }
    }

    pub fn semicontinuity_violations(&self) -> Vec<&str> {
        self.reports.iter().filter(|r| r.semicontinuity_violated).map(|r| r.invariant.as_str()).collect()
    }
}

fn fibers(family: &GermFamily, points: &[Vec<Rational>]) -> Vec<Result<FiberGerm>> {
    points.iter().map(|p| specialize(family, p)).collect()
}

/// Evaluate `f` on every fiber in parallel; results keep the point order.
fn evaluate<T: Send>(fibers: &[Result<FiberGerm>], f: impl Fn(&FiberGerm) -> Result<T> + Sync) -> Vec<Result<T>> {
    fibers
        .par_iter()
        .map(|g| match g {
            Ok(g) => f(g),
            Err(e) => Err(e.clone()),
        })
        .collect()
}

fn scalar(r: &Result<u64>) -> Outcome {
    r.clone().map(Value::Scalar).into()
}

const WHITNEY_NOTE: &str = "constancy of e^0..e^(p-1) is sufficient, not necessary, for Whitney condition A \
along the parameter axis; NOT_CONSTANT is no evidence against the condition";

/// Associated multiplicities e^j of the fiber Jacobian module at 0 and at
/// each sample.
pub fn check_whitney_a(family: &GermFamily, cfg: &CheckConfig) -> Result<CheckOutcome> {
    cfg.validate()?;
    if family.p() == 0 {
        return Err(Error::InvalidInput("Whitney check needs at least one defining equation".into()));
    }
    let points = cfg.points(family.m());
    let fib = fibers(family, &points);
    let gen = &cfg.genericity;
    let rows: Vec<Result<Vec<u64>>> = evaluate(&fib, |g| {
        let m = jacobian_module(g, JacobianKind::Relative)?;
        associated_multiplicities(&m, g, gen).into_iter().map(|r| r.map(|x| x.value)).collect()
    });
    let reports = (0..family.p())
        .map(|j| {
            let outs = rows.iter().map(|r| r.as_ref().map(|v| Value::Scalar(v[j])).map_err(Clone::clone).into()).collect();
            ConstancyReport::build(format!("e^{j}"), &points, outs, gen.seed, true)
        })
        .collect();
    let mut notes = vec![WHITNEY_NOTE.to_string()];
    if family.locus == Locus::Branches {
        notes.push("fibers off the origin are summed over the branches of the singular locus".into());
    }
    Ok(CheckOutcome::from_reports(reports, &notes))
}

/// Substitute y -> y + B z: the retraction (z, y) -> y - B z becomes the
/// coordinate projection.
fn retracted(family: &GermFamily, k: usize, seed: u64) -> Result<GermFamily> {
    if k == 0 {
        return Ok(family.clone());
    }
    let (l, n) = (family.l(), family.ring.nvars());
    let mut rng = stream(seed, "retraction", k);
    let images: Vec<Polynomial> = (0..n)
        .map(|v| {
            let mut img = Polynomial::var(n, v);
            if v >= l {
                for z in 0..l {
                    let c: i64 = rng.gen_range(-5..=5);
                    img = &img + &Polynomial::var(n, z).scale(&Rational::from_integer(c.into()));
                }
            }
            img
        })
        .collect();
    let sub = |p: &Polynomial| p.substitute(&images);
    GermFamily::new(
        family.ring.clone(),
        family.equations.iter().map(sub).collect(),
        family.function.as_ref().map(sub),
        family.locus,
    )
}

fn milnor_sum(g: &FiberGerm, gen: &GenericityConfig) -> Result<u64> {
    let f = g.function.clone().ok_or_else(|| Error::InvalidInput("f is required".into()))?;
    let mut z = g.equations.clone();
    z.push(f);
    Ok(milnor_icis(&g.equations, &g.ring, gen)? + milnor_icis(&z, &g.ring, gen)?)
}

/// Thom A_f: e(r, y) = BR multiplicity of JM(F; f)_r on the fiber of each
/// sampled retraction r, cross-checked against μ(X(y)) + μ(Z(y)).
pub fn check_af(family: &GermFamily, cfg: &CheckConfig) -> Result<CheckOutcome> {
    cfg.validate()?;
    if family.function.is_none() {
        return Err(Error::InvalidInput("A_f check needs a function f".into()));
    }
    if family.locus == Locus::Branches {
        return Err(Error::InvalidInput("A_f check needs the singular locus along the parameter axis".into()));
    }
    let points = cfg.points(family.m());
    let gen = &cfg.genericity;
    let mut reports = Vec::new();
    for k in 0..cfg.retraction_draws {
        let fam = retracted(family, k, gen.seed)?;
        let fib = fibers(&fam, &points);
        let vals: Vec<Result<u64>> = evaluate(&fib, |g| {
            let br = br_multiplicity(&augmented_fiber_module(g)?, g, gen)?.value;
            let mu = milnor_sum(g, gen)?;
            if br != mu {
                return Err(Error::Internal(format!("e(r,y) = {br} but mu(X) + mu(Z) = {mu}")));
            }
            Ok(br)
        });
        let outs = vals.iter().map(scalar).collect();
        let name = if k == 0 { "e(r) [coordinate projection]".to_string() } else { format!("e(r) [retraction {k}]") };
        reports.push(ConstancyReport::build(name, &points, outs, gen.seed, true));
    }
    let notes = vec![
        "each value is checked to equal mu(X(y)) + mu(Z(y)) on the retraction fiber".to_string(),
        format!(
            "A_f needs constancy for every linear retraction; {} sampled retraction(s) were checked",
            cfg.retraction_draws
        ),
        "single-retraction sufficiency assumes (Z - Y, Y) satisfies Whitney condition A at 0; \
         this hypothesis is not checked"
            .to_string(),
    ];
    Ok(CheckOutcome::from_reports(reports, &notes))
}

/// W_f: em(y) by the Buchsbaum-Rim multiplicity and by the sectional Milnor
/// numbers, with the μ_i sequences of X(y) and Z(y).
pub fn check_wf(family: &GermFamily, cfg: &CheckConfig) -> Result<CheckOutcome> {
    cfg.validate()?;
    if family.p() == 0 || family.function.is_none() {
        return Err(Error::InvalidInput("W_f check needs defining equations and a function f".into()));
    }
    if family.locus == Locus::Branches {
        return Err(Error::InvalidInput("W_f check needs the singular locus along the parameter axis".into()));
    }
    let points = cfg.points(family.m());
    let fib = fibers(family, &points);
    let gen = &cfg.genericity;
    let rows: Vec<Result<(u64, Vec<(u64, Option<u64>)>)>> = evaluate(&fib, |g| {
        let em = em_invariant(g, gen)?.value;
        let via = em_via_milnor(g, gen)?;
        if em != via {
            return Err(Error::Internal(format!("em = {em} but the sectional Milnor sum is {via}")));
        }
        Ok((em, sectional_milnor_sequence(g, true, gen)?))
    });
    let d = family.d();
    let mut em_report = ConstancyReport::build(
        "em",
        &points,
        rows.iter().map(|r| scalar(&r.as_ref().map(|x| x.0).map_err(Clone::clone))).collect(),
        gen.seed,
        true,
    );
    let mut reports = Vec::new();
    for i in 0..=d {
        for (side, pick) in [("X", 0usize), ("Z", 1)] {
            let outs = rows
                .iter()
                .map(|r| {
                    scalar(&r.as_ref().map_err(Clone::clone).map(|(_, s)| if pick == 0 { s[i].0 } else { s[i].1.unwrap_or(0) }))
                })
                .collect();
            reports.push(ConstancyReport::build(format!("mu_{i}({side})"), &points, outs, gen.seed, false));
        }
    }
    let jumps: Vec<&str> = reports.iter().filter(|r| r.verdict == Verdict::NotConstant).map(|r| r.invariant.as_str()).collect();
    let all_mu = Verdict::combine(reports.iter().map(|r| r.verdict));
    if em_report.verdict != Verdict::Inconclusive && all_mu != Verdict::Inconclusive && (em_report.verdict == Verdict::Certified) != (all_mu == Verdict::Certified) {
        em_report.notes.push("internal error: em constancy disagrees with constancy of the mu_i".into());
        em_report.verdict = Verdict::Inconclusive;
    }
    em_report.notes.push("em via sectional Milnor numbers uses the weights binom(l, i)".into());
    match em_report.verdict {
        Verdict::Certified => em_report.notes.push(
            "em is constant: W_f holds, hence Whitney conditions for (X - Y, Y) and (Z - Y, Y)".into(),
        ),
        Verdict::NotConstant => {
            em_report.notes.push("em is not constant: W_f fails (the criterion is an equivalence)".into());
            em_report.notes.push(format!("jumping: {}", jumps.join(", ")));
        }
        Verdict::Inconclusive => {}
    }
    let verdict = em_report.verdict;
    let mut all = vec![em_report];
    all.extend(reports);
    Ok(CheckOutcome { verdict, reports: all })
}

/// Per level i of the chain f_(k-1), ..., f_0: colength of the zeroth Fitting
/// ideal of JM(F, f_(k-1), .., f_(i+1); f_i)_r, which equals
/// μ(X_(i+1)(y)) + μ(X_i(y)).
pub fn chain_milnor_report(family: &GermFamily, chain: &[Polynomial], cfg: &CheckConfig) -> Result<CheckOutcome> {
    cfg.validate()?;
    if chain.is_empty() {
        return Err(Error::InvalidInput("the chain is empty".into()));
    }
    if family.locus == Locus::Branches {
        return Err(Error::InvalidInput("chain report needs the singular locus along the parameter axis".into()));
    }
    let k = chain.len();
    let points = cfg.points(family.m());
    let gen = &cfg.genericity;
    let mut reports = Vec::new();
    for (pos, _) in chain.iter().enumerate() {
        let level = k - 1 - pos;
        let mut eqs = family.equations.clone();
        eqs.extend(chain[..pos].iter().cloned());
        let fam = GermFamily::new(family.ring.clone(), eqs, Some(chain[pos].clone()), Locus::Section)?;
        let fib = fibers(&fam, &points);
        let vals: Vec<Result<(u64, u64, u64)>> = evaluate(&fib, |g| {
            let mut gs = g.equations.clone();
            gs.push(g.function.clone().expect("set above"));
            let c = match lg_colength(&gs, &g.ring, gen.budget)? {
                Colength::Finite(c) => c,
                Colength::Infinite => return Err(Error::NotIcis("Fitting ideal has infinite colength".into())),
            };
            let upper = milnor_icis(&g.equations, &g.ring, gen)?;
            let lower = milnor_icis(&gs, &g.ring, gen)?;
            if c != upper + lower {
                return Err(Error::Internal(format!(
                    "colength {c} differs from mu(X_{}) + mu(X_{level}) = {upper} + {lower}",
                    level + 1
                )));
            }
            Ok((c, upper, lower))
        });
        let outs = vals.iter().map(|r| scalar(&r.as_ref().map(|x| x.0).map_err(Clone::clone))).collect();
        let mut rep = ConstancyReport::build(format!("J_{level}"), &points, outs, gen.seed, true);
        let detail: Vec<String> = points
            .iter()
            .zip(&vals)
            .filter_map(|(p, v)| v.as_ref().ok().map(|(c, a, b)| format!("at {}: {c} = {a} + {b}", point_label(p))))
            .collect();
        rep.notes.push(format!("mu(X_{}) + mu(X_{level}): {}", level + 1, detail.join("; ")));
        reports.push(rep);
    }
    Ok(CheckOutcome::from_reports(reports, &[]))
}

/// Invariants at 0 and the samples, each with its own constancy verdict.
pub fn invariant_table(family: &GermFamily, cfg: &CheckConfig) -> Result<Vec<ConstancyReport>> {
    cfg.validate()?;
    let points = cfg.points(family.m());
    let gen = &cfg.genericity;
    let mut out = Vec::new();
    if family.p() > 0 {
        out.extend(check_whitney_a(family, cfg)?.reports);
        for r in out.iter_mut() {
            r.notes.clear();
        }
        let (d, p) = (family.d(), family.p());
        let segre = segre_from(&out, d, p);
        out.push(ConstancyReport::build("segre", &points, segre, gen.seed, false));
    }
    if family.locus == Locus::Branches {
        return Ok(out);
    }
    let fib = fibers(family, &points);
    let mult = evaluate(&fib, |g| if g.p() == 0 { Ok(1) } else { multiplicity(g, gen).map(|r| r.value) });
    out.push(ConstancyReport::build("mult(X)", &points, mult.iter().map(scalar).collect(), gen.seed, true));
    let mu_x = evaluate(&fib, |g| milnor_icis(&g.equations, &g.ring, gen));
    out.push(ConstancyReport::build("mu(X)", &points, mu_x.iter().map(scalar).collect(), gen.seed, true));
    if family.function.is_some() {
        let mu_z = evaluate(&fib, |g| {
            let mut z = g.equations.clone();
            z.push(g.function.clone().expect("checked"));
            milnor_icis(&z, &g.ring, gen)
        });
        out.push(ConstancyReport::build("mu(Z)", &points, mu_z.iter().map(scalar).collect(), gen.seed, true));
        if family.p() > 0 {
            let em = evaluate(&fib, |g| em_invariant(g, gen).map(|r| r.value));
            out.push(ConstancyReport::build("em", &points, em.iter().map(scalar).collect(), gen.seed, true));
        }
    }
    Ok(out)
}

fn segre_from(reports: &[ConstancyReport], d: usize, p: usize) -> Vec<Outcome> {
    let npoints = reports[0].samples.len() + 1;
    (0..npoints)
        .map(|i| {
            let mut e = Vec::with_capacity(p);
            for r in &reports[..p] {
                match r.values().nth(i).flatten() {
                    Some(Value::Scalar(v)) => e.push(*v),
                    _ => return Outcome::Error("associated multiplicities unavailable".into()),
                }
            }
            crate::invariants::segre_numbers(&e, d, p).map(Value::Vector).into()
        })
        .collect()
}
