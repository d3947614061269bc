//! One PASS/FAIL line per acceptance criterion. Exits nonzero when the set
//! of failing criteria differs from the documented known failures.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;

use common::{oracle_colength, oracle_milnor, q};
use icis::arc::{arc_dependence_test, pull_back_orders, Arc, Dependence, Order, OrderProfile};
use icis::dsl::{parse_germ_file, GermFile, DEFAULT_TRUNCATION};
use icis::equising::{chain_milnor_report, check_whitney_a, invariant_table, CheckConfig, Value, Verdict};
use icis::family::{jacobian_module, specialize, FiberGerm, GermFamily, JacobianKind, Locus};
use icis::invariants::*;
use icis::ring::{parse_polynomial, Monomial, Polynomial, RingSpec};
use icis::sb::{colength, Colength, SubmoduleOfFree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot hold as literally stated; see the README.
const KNOWN_FAILURES: &[u32] = &[5, 6];

type Check = Result<String, String>;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn load(name: &str) -> GermFile {
    let path = corpus_dir().join(name);
    parse_germ_file(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn corpus() -> Vec<(String, GermFile)> {
    let mut out: Vec<(String, GermFile)> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("germ"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, parse_germ_file(&std::fs::read_to_string(&p).unwrap()).unwrap())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn gen(seed: u64) -> GenericityConfig {
    GenericityConfig::with_seed(seed)
}

fn fiber(fam: &GermFamily, y: i64) -> FiberGerm {
    specialize(fam, &[q(y)]).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: icis::Error) -> String {
    e.to_string()
}

fn jacobian_ideal(g: &FiberGerm) -> SubmoduleOfFree {
    let m = jacobian_module(g, JacobianKind::Relative).unwrap();
    SubmoduleOfFree::ideal(g.ring.clone(), m.gens.iter().map(|c| c[0].clone()).collect(), g.equations.clone()).unwrap()
}

/// (BR, e^1) of the fiber Jacobian module of the quartic ICIS at y = 0, 1.
fn quartic_values(seed: u64) -> Result<Vec<(u64, u64, Vec<u64>)>, String> {
    let fam = load("example_2_3.germ").family;
    let mut out = Vec::new();
    for y in [0, 1] {
        let g = fiber(&fam, y);
        let m = jacobian_module(&g, JacobianKind::Relative).map_err(err)?;
        let br = br_multiplicity(&m, &g, &gen(seed)).map_err(err)?.value;
        let e: Vec<u64> = associated_multiplicities(&m, &g, &gen(seed))
            .into_iter()
            .map(|r| r.map(|x| x.value))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let s = segre_numbers(&e, g.d(), g.p()).map_err(err)?;
        out.push((br, e[1], s));
    }
    Ok(out)
}

fn c1() -> Check {
    let v = quartic_values(0)?;
    ensure(v[0].0 == 36 && v[1].0 == 36, || format!("BR multiplicities {} and {}", v[0].0, v[1].0))?;
    ensure(v[0].1 == 4 && v[1].1 == 0, || format!("e^1 = {} and {}", v[0].1, v[1].1))?;
    ensure(v[0].2 == [4, 32] && v[1].2 == [0, 36], || format!("Segre {:?} and {:?}", v[0].2, v[1].2))?;
    Ok("e = 36, 36; e^1 = 4, 0; (s^2, s^3) = (4, 32), (0, 36)".into())
}

fn umbrella_values(seed: u64) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for file in ["umbrella_b1.germ", "umbrella_b2.germ"] {
        let fam = load(file).family;
        for y in [0, 1] {
            let g = fiber(&fam, y);
            out.push(samuel_multiplicity(&jacobian_ideal(&g), &g, &gen(seed)).map_err(err)?.value);
        }
    }
    Ok(out)
}

fn c2() -> Check {
    let v = umbrella_values(0)?;
    ensure(v == [3, 2, 3, 2], || format!("e^0 (b=1: 0, 1; b=2: 0, 1) = {v:?}"))?;
    Ok("e^0 = 3 at y = 0 and 2 at y = 1 for b = 1, 2".into())
}

fn branch_values(seed: u64) -> Result<(Verdict, Vec<Option<Value>>), String> {
    let fam = load("example_4_4.germ").family;
    let mut cfg = CheckConfig::with_seed(seed);
    cfg.samples = vec![q(1), q(-2)];
    let out = check_whitney_a(&fam, &cfg).map_err(err)?;
    Ok((out.verdict, out.reports[0].values().map(|v| v.cloned()).collect()))
}

fn c3() -> Check {
    let (verdict, e0) = branch_values(0)?;
    ensure(verdict == Verdict::Certified, || format!("verdict {verdict}"))?;
    ensure(e0.iter().all(|v| *v == Some(Value::Scalar(4))) && e0.len() == 3, || format!("e^0 = {e0:?}"))?;
    let path = corpus_dir().join("example_4_4.germ");
    let st = Command::new(env!("CARGO_BIN_EXE_icis"))
        .args(["check", "whitney-a", path.to_str().unwrap(), "--samples", "1,-2"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(st.status.code() == Some(0), || format!("binary exit {:?}", st.status.code()))?;
    Ok("CERTIFIED, e^0 = 4 at 0, 1, -2 (library and binary)".into())
}

fn fin(n: u32) -> OrderProfile {
    OrderProfile { orders: vec![Order::Finite(n)] }
}

fn c4() -> Check {
    let g = load("example_1_3.germ");
    let phi = g.arc("phi", DEFAULT_TRUNCATION).map_err(err)?;
    let m = pull_back_orders(&g.modules["M"], &phi).map_err(err)?;
    let n = pull_back_orders(&g.modules["N"], &phi).map_err(err)?;
    ensure(m == fin(3) && n == fin(5), || format!("orders M {m}, N {n}"))?;
    let dep = arc_dependence_test(&g.elements["h"], &g.modules["N"], &phi, false).map_err(err)?;
    ensure(dep == Dependence::Refuted, || format!("t^3 on N: {dep}"))?;
    // fiberwise: the ideals of M(s) and N(s) in the t-line
    let fr = RingSpec::from_names("t", "").unwrap();
    let line = Arc::new("line", vec![icis::arc::parse_series("t").unwrap()], DEFAULT_TRUNCATION).map_err(err)?;
    for (s, want) in [(0, 3), (1, 2)] {
        for name in ["M", "N"] {
            let gens: Vec<Polynomial> = g.modules[name]
                .ideal_gens()
                .iter()
                .map(|p| p.specialize(&[(1, q(s))]).remap(1, &[Some(0), None]))
                .collect();
            let ideal = SubmoduleOfFree::ideal(fr.clone(), gens, vec![]).map_err(err)?;
            let o = pull_back_orders(&ideal, &line).map_err(err)?;
            ensure(o == fin(want), || format!("{name}({s}) has order profile {o}"))?;
        }
    }
    Ok("orders 3 (M) and 5 (N); t^3 on N REFUTED; fibers s=0: 3/3, s=1: 2/2".into())
}

fn strict_test(file: &str, arc: &str) -> Result<Dependence, String> {
    let g = load(file);
    let jm = jacobian_module(&g.family, JacobianKind::Absolute).map_err(err)?;
    let h = jacobian_module(&g.family, JacobianKind::Param).map_err(err)?.gens[0].clone();
    let phi = g.arc(arc, DEFAULT_TRUNCATION).map_err(err)?;
    arc_dependence_test(&h, &jm, &phi, true).map_err(err)
}

fn c5() -> Check {
    let b1 = strict_test("umbrella_b1.germ", "phi")?;
    ensure(b1 == Dependence::Refuted, || format!("b=1: {b1}"))?;
    // the same arc on the b = 2 surface
    let g = load("umbrella_b2.germ");
    let jm = jacobian_module(&g.family, JacobianKind::Absolute).map_err(err)?;
    let h = jacobian_module(&g.family, JacobianKind::Param).map_err(err)?.gens[0].clone();
    let phi = load("umbrella_b1.germ").arc("phi", DEFAULT_TRUNCATION).map_err(err)?;
    let b2 = arc_dependence_test(&h, &jm, &phi, true).map_err(|e| format!("b=1 REFUTED; b=2 with the same arc: {e}"))?;
    ensure(b2 == Dependence::Consistent, || format!("b=2: {b2}"))?;
    Ok("b=1 REFUTED, b=2 CONSISTENT".into())
}

fn c5b() -> Check {
    let b1 = strict_test("umbrella_b1.germ", "phi")?;
    let b2 = strict_test("umbrella_b2.germ", "psi")?;
    ensure(b1 == Dependence::Refuted && b2 == Dependence::Consistent, || format!("b=1 {b1}, b=2 {b2}"))?;
    Ok("b=1 arc REFUTED; b=2 arc on its own surface CONSISTENT".into())
}

struct EmFiber {
    name: &'static str,
    germ: FiberGerm,
    /// Plane curves (in two of the variables) for μ_0(Z) and μ_1(X).
    z_curve: Polynomial,
    x_section: Polynomial,
}

fn em_fibers() -> Vec<EmFiber> {
    let r2 = RingSpec::from_names("a b", "").unwrap();
    let p2 = |s: &str| parse_polynomial(s, &r2).unwrap();
    vec![
        EmFiber {
            name: "a1_surface_with_f",
            germ: fiber(&load("a1_surface_with_f.germ").family, 0),
            z_curve: p2("a^2 + b^2"),
            x_section: p2("a^2 + b^2 + (2*a - 3*b)^2"),
        },
        EmFiber {
            name: "a2_surface_with_f",
            germ: fiber(&load("a2_surface_with_f.germ").family, 0),
            z_curve: p2("a^2 + b^2"),
            x_section: p2("a^2 + b^2 + (2*a - 3*b)^3"),
        },
        EmFiber {
            name: "quadric_with_f",
            germ: fiber(&load("quadric_with_f.germ").family, 0),
            // x = -y on x*y + z^2, in (y, z) = (a, b)
            z_curve: p2("-a^2 + b^2"),
            x_section: p2("a*b + (2*a - 3*b)^2"),
        },
    ]
}

fn ord(p: &Polynomial) -> u64 {
    p.order().unwrap() as u64
}

/// Independent (μ_i(X) + μ_i(Z)) for i = 0, 1, 2 on a surface in C^3.
fn oracle_sections(f: &EmFiber) -> Result<Vec<u64>, String> {
    let g = &f.germ;
    let mu0x = oracle_milnor(&g.equations[0], 16).ok_or("no oracle for mu_0(X)")? as u64;
    let mu0z = oracle_milnor(&f.z_curve, 16).ok_or("no oracle for mu_0(Z)")? as u64;
    let mu1x = oracle_milnor(&f.x_section, 16).ok_or("no oracle for mu_1(X)")? as u64;
    let mu1z = ord(&f.z_curve) - 1;
    let mu2x = ord(&g.equations[0]) - 1;
    Ok(vec![mu0x + mu0z, mu1x + mu1z, mu2x + 1])
}

fn cross_formula(top: u64, seed: u64) -> Result<Vec<String>, String> {
    let mut lines = Vec::new();
    let mut bad = Vec::new();
    for f in em_fibers() {
        let g = &f.germ;
        let em = em_invariant(g, &gen(seed)).map_err(err)?.value;
        let via = em_via_milnor_weighted(g, &gen(seed), top).map_err(err)?;
        let seq = sectional_milnor_sequence(g, true, &gen(seed)).map_err(err)?;
        let sums: Vec<u64> = seq.iter().map(|(x, z)| x + z.unwrap_or(0)).collect();
        let oracle = oracle_sections(&f)?;
        ensure(sums == oracle, || format!("{}: mu sums {sums:?} vs oracle {oracle:?}", f.name))?;
        let polar: Vec<u64> = (0..=g.d())
            .map(|i| polar_multiplicity(g, i, &gen(seed)).map(|r| r.value))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let polar_sum: u64 = polar.iter().enumerate().map(|(i, m)| binomial(top, i as u64) * m).sum();
        let oracle_sum: u64 = oracle.iter().enumerate().map(|(i, m)| binomial(top, i as u64) * m).sum();
        lines.push(format!("{}: em {em}, sections {via}, polar {polar_sum}, oracle {oracle_sum}", f.name));
        if !(em == via && em == polar_sum && em == oracle_sum) {
            bad.push(lines.last().unwrap().clone());
        }
    }
    if bad.is_empty() {
        Ok(lines)
    } else {
        Err(bad.join("; "))
    }
}

fn c6() -> Check {
    // weights binom(l - 1, i) with l = 3
    cross_formula(2, 0).map(|l| l.join("; "))
}

fn c6b() -> Check {
    cross_formula(3, 0).map(|l| l.join("; "))
}

fn c7() -> Check {
    let mut n = 0;
    for (name, g) in corpus() {
        if g.chain.is_empty() {
            continue;
        }
        let out = chain_milnor_report(&g.family, &g.chain, &CheckConfig::default()).map_err(err)?;
        for r in &out.reports {
            ensure(r.values().all(|v| v.is_some()), || format!("{name} {}: {:?}", r.invariant, r.at_origin))?;
            n += r.samples.len() + 1;
        }
        if name == "chain_jump.germ" {
            // X_1 = {z = 0} is smooth; X_0 is the plane curve, checked by its Jacobian colength
            let r2 = RingSpec::from_names("x y", "").unwrap();
            let j0 = out.reports.iter().find(|r| r.invariant == "J_0").ok_or("no J_0")?;
            for (pt, v) in ["0", "1", "-2"].iter().zip(j0.values()) {
                let curve = parse_polynomial(&format!("x^2 + y^2*(y + ({pt}))"), &r2).unwrap();
                let mu = oracle_milnor(&curve, 16).ok_or("no oracle")? as u64;
                ensure(v == Some(&Value::Scalar(mu)), || format!("{name} J_0 at {pt}: {v:?}, oracle {mu}"))?;
            }
        }
    }
    ensure(n > 0, || "no chains in the corpus".into())?;
    Ok(format!("{n} levels and points, colength = sum of adjacent Milnor numbers at each"))
}

fn audited(name: &str) -> bool {
    name.starts_with("e^") || matches!(name, "mult(X)" | "mu(X)" | "mu(Z)" | "em")
}

fn c8() -> Check {
    let mut checked = 0;
    for (name, g) in corpus() {
        for seed in 0..5 {
            let reports = invariant_table(&g.family, &CheckConfig::with_seed(seed)).map_err(err)?;
            for r in reports.iter().filter(|r| audited(&r.invariant)) {
                let Some(Value::Scalar(origin)) = r.at_origin.value() else {
                    return Err(format!("{name} seed {seed} {}: {}", r.invariant, r.at_origin));
                };
                for s in &r.samples {
                    match s.outcome.value() {
                        Some(Value::Scalar(v)) if v <= origin => checked += 1,
                        _ => return Err(format!("{name} seed {seed} {} at {}: {} vs {origin}", r.invariant, s.point, s.outcome)),
                    }
                }
            }
        }
    }
    Ok(format!("{checked} comparisons over the corpus and 5 seeds"))
}

fn segre_audit() -> Result<usize, String> {
    let mut n = 0;
    for (name, g) in corpus() {
        if g.family.p() == 0 {
            continue;
        }
        let reports = invariant_table(&g.family, &CheckConfig::default()).map_err(err)?;
        let e0 = reports.iter().find(|r| r.invariant == "e^0").unwrap();
        let segre = reports.iter().find(|r| r.invariant == "segre").unwrap();
        for (e, s) in e0.values().zip(segre.values()) {
            let (Some(Value::Scalar(e)), Some(Value::Vector(s))) = (e, s) else {
                return Err(format!("{name}: missing e^0 or Segre numbers"));
            };
            // s^d..s^r; indices below d are zero by construction
            ensure(s.len() == g.family.p() && s.iter().sum::<u64>() == *e, || format!("{name}: {s:?} vs e^0 {e}"))?;
            n += 1;
        }
    }
    Ok(n)
}

fn br_samuel_audit() -> Result<usize, String> {
    let mut n = 0;
    for (name, g) in corpus() {
        if g.family.p() != 1 || g.family.locus == Locus::Branches {
            continue;
        }
        for pt in CheckConfig::default().points(g.family.m()) {
            let f = specialize(&g.family, &pt).map_err(err)?;
            let m = jacobian_module(&f, JacobianKind::Relative).map_err(err)?;
            let br = br_multiplicity(&m, &f, &gen(0)).map_err(err)?.value;
            let sam = samuel_multiplicity(&jacobian_ideal(&f), &f, &gen(0)).map_err(err)?.value;
            ensure(br == sam, || format!("{name} at {pt:?}: BR {br}, Samuel {sam}"))?;
            n += 1;
        }
    }
    Ok(n)
}

fn random_poly(rng: &mut ChaCha8Rng, lead: Monomial) -> Polynomial {
    let mut p = Polynomial::term(lead, q(1));
    for _ in 0..3 {
        let m = Monomial(vec![rng.gen_range(0..5), rng.gen_range(0..5)]);
        if m.degree() > 1 {
            p = &p + &Polynomial::term(m, q(rng.gen_range(-3..=3)));
        }
    }
    p
}

fn recombination_audit() -> Result<usize, String> {
    let r = RingSpec::from_names("x y", "").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for case in 0..20 {
        let a = rng.gen_range(1..5);
        let b = rng.gen_range(1..5);
        let gens = vec![
            random_poly(&mut rng, Monomial(vec![a, 0])),
            random_poly(&mut rng, Monomial(vec![0, b])),
            random_poly(&mut rng, Monomial(vec![1, 1])),
        ];
        // unit upper triangular times unit lower triangular: invertible
        let k = gens.len();
        let upper: Vec<Vec<i64>> =
            (0..k).map(|i| (0..k).map(|j| if i == j { 1 } else if j > i { rng.gen_range(-4..=4) } else { 0 }).collect()).collect();
        let lower: Vec<Vec<i64>> =
            (0..k).map(|i| (0..k).map(|j| if i == j { 1 } else if j < i { rng.gen_range(-4..=4) } else { 0 }).collect()).collect();
        let apply = |mat: &Vec<Vec<i64>>, v: &[Polynomial]| -> Vec<Polynomial> {
            mat.iter()
                .map(|row| row.iter().zip(v).fold(Polynomial::zero(2), |acc, (c, p)| &acc + &p.scale(&q(*c))))
                .collect()
        };
        let mixed = apply(&upper, &apply(&lower, &gens));
        let c0 = colength(&SubmoduleOfFree::ideal(r.clone(), gens.clone(), vec![]).unwrap()).map_err(err)?;
        let c1 = colength(&SubmoduleOfFree::ideal(r.clone(), mixed, vec![]).unwrap()).map_err(err)?;
        let oracle = oracle_colength(&gens, 2, 20).map(|c| Colength::Finite(c as u64));
        ensure(c0 == c1 && Some(c0) == oracle, || format!("case {case}: {c0:?} vs {c1:?}, oracle {oracle:?}"))?;
    }
    Ok(20)
}

fn round_trip_audit() -> Result<usize, String> {
    let mut n = 0;
    for (name, g) in corpus() {
        let r = &g.family.ring;
        for p in g.family.equations.iter().chain(g.family.function.iter()).chain(g.chain.iter()) {
            let s = p.to_string_in(r);
            let back = parse_polynomial(&s, r).map_err(|e| format!("{name}: {e}"))?;
            ensure(&back == p && back.to_string_in(r) == s, || format!("{name}: {s}"))?;
            n += 1;
        }
    }
    Ok(n)
}

fn seed_audit() -> Result<(), String> {
    ensure(quartic_values(0)? == quartic_values(1)?, || "quartic ICIS values depend on the seed".into())?;
    ensure(umbrella_values(0)? == umbrella_values(1)?, || "umbrella values depend on the seed".into())?;
    ensure(branch_values(0)? == branch_values(1)?, || "branch locus values depend on the seed".into())?;
    ensure(cross_formula(3, 0)? == cross_formula(3, 1)?, || "em values depend on the seed".into())?;
    Ok(())
}

fn c9() -> Check {
    let segre = segre_audit()?;
    let br = br_samuel_audit()?;
    let rec = recombination_audit()?;
    let rt = round_trip_audit()?;
    seed_audit()?;
    Ok(format!("Segre sums {segre}, BR = Samuel {br}, recombination {rec}, round trips {rt}, seeds 0/1 agree"))
}

fn c10() -> Check {
    let r = RingSpec::from_names("x y", "").unwrap();
    let budget = Default::default();
    for k in 1..=5u64 {
        let f = parse_polynomial(&format!("x^{} + y^2", k + 1), &r).unwrap();
        let mu = milnor_hypersurface(&f, &r, budget).map_err(err)?;
        let oracle = oracle_milnor(&f, 12).map(|v| v as u64);
        ensure(mu == k && oracle == Some(k), || format!("x^{} + y^2: {mu}, oracle {oracle:?}", k + 1))?;
    }
    let node = parse_polynomial("x^2 + y^2", &r).unwrap();
    ensure(milnor_hypersurface(&node, &r, budget).map_err(err)? == 1, || "node".into())?;
    let smooth = parse_polynomial("x + y^2", &r).unwrap();
    ensure(milnor_hypersurface(&smooth, &r, budget).map_err(err)? == 0, || "smooth".into())?;
    Ok("mu(x^(k+1) + y^2) = k for k = 1..5, node 1, smooth 0".into())
}

fn main() {
    let criteria: Vec<(&str, fn() -> Check)> = vec![
        ("1", c1),
        ("2", c2),
        ("3", c3),
        ("4", c4),
        ("5", c5),
        ("5b", c5b),
        ("6", c6),
        ("6b", c6b),
        ("7", c7),
        ("8", c8),
        ("9", c9),
        ("10", c10),
    ];
    let mut failing = BTreeSet::new();
    let mut extra_failing = Vec::new();
    for (id, check) in criteria {
        let res = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match res {
            Ok(detail) => println!("PASS criterion {id}: {detail}"),
            Err(why) => {
                println!("FAIL criterion {id}: {why}");
                match id.parse::<u32>() {
                    Ok(n) => {
                        failing.insert(n);
                    }
                    Err(_) => extra_failing.push(id),
                }
            }
        }
    }
    let known: BTreeSet<u32> = KNOWN_FAILURES.iter().copied().collect();
    if failing != known || !extra_failing.is_empty() {
        println!("unexpected outcome: failing {failing:?} {extra_failing:?}, documented {known:?}");
        std::process::exit(1);
    }
    println!("failing criteria match the documented set {known:?}");
}
