use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use icis::arc::{arc_dependence_test, pull_back_orders, Dependence};
use icis::dsl::{parse_germ_file, GermFile, DEFAULT_TRUNCATION};
use icis::equising::{
    chain_milnor_report, check_af, check_whitney_a, check_wf, invariant_table, CheckConfig, CheckOutcome,
    ConstancyReport, Verdict,
};
use icis::family::{jacobian_module, JacobianKind};
use icis::invariants::GenericityConfig;
use icis::ring::{parse_polynomial, CoefficientField, Rational, RingSpec};
use icis::sb::Budget;
use icis::Error;

const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "icis", version, about = "Invariants and equisingularity checks for families of ICIS germs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// Seed for every generic choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Nonzero sample parameter values, comma separated
    #[arg(long, global = true, default_value = "1,-2", allow_hyphen_values = true)]
    samples: String,
    /// Total sample count; random small rationals fill up the list
    #[arg(long, global = true)]
    sample_count: Option<usize>,
    /// Independent draws per generic value
    #[arg(long, global = true, default_value_t = 2)]
    draws: usize,
    /// Arc truncation order
    #[arg(long, global = true, default_value_t = DEFAULT_TRUNCATION)]
    trunc: u32,
    /// Random linear retractions for the A_f check
    #[arg(long, global = true, default_value_t = 3)]
    retractions: usize,
    /// Coefficient field: qq or fp:PRIME
    #[arg(long, global = true, default_value = "qq")]
    field: String,
    /// Write the report as JSON to this path
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Bound on leading-monomial degrees in standard bases
    #[arg(long, global = true, default_value_t = 30)]
    degree_bound: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants at the origin and at the samples
    Invariants { file: PathBuf },
    /// Constancy checks
    Check {
        #[arg(value_enum)]
        condition: Condition,
        file: PathBuf,
    },
    /// Milnor numbers along the chain declared in the file
    ChainReport { file: PathBuf },
    /// Pull modules back along an arc and test dependence
    ArcTest {
        file: PathBuf,
        #[arg(long)]
        arc: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Condition {
    #[value(name = "whitney-a")]
    WhitneyA,
    #[value(name = "af")]
    Af,
    #[value(name = "wf")]
    Wf,
}

enum Failure {
    Usage(String),
    Parse(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Dsl { .. } | Error::Parse(_) => Failure::Parse(e.to_string()),
            e => Failure::Compute(e.to_string()),
        }
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let ring = RingSpec::from_names("x", "").ok()?;
    let p = parse_polynomial(s, &ring).ok()?;
    (p.degree() == 0).then(|| p.constant_term())
}

fn check_config(o: &Opts) -> Result<CheckConfig, Failure> {
    let samples = o
        .samples
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_rational(s.trim()).ok_or_else(|| Failure::Usage(format!("bad sample value `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = CheckConfig {
        sample_count: o.sample_count.unwrap_or(samples.len()),
        samples,
        retraction_draws: o.retractions,
        genericity: GenericityConfig {
            seed: o.seed,
            draws: o.draws,
            budget: Budget { degree_bound: o.degree_bound, ..Budget::default() },
            ..GenericityConfig::default()
        },
    };
    Ok(cfg)
}

fn field(o: &Opts) -> Result<CoefficientField, Failure> {
    match o.field.as_str() {
        "qq" => Ok(CoefficientField::Rationals),
        s => {
            let p = s
                .strip_prefix("fp:")
                .and_then(|p| p.parse::<u64>().ok())
                .ok_or_else(|| Failure::Usage(format!("bad field `{s}`; expected qq or fp:PRIME")))?;
            CoefficientField::prime(p).map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

fn load(path: &Path, o: &Opts) -> Result<GermFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut file = parse_germ_file(&text).map_err(|e| match e {
        Error::Dsl { .. } | Error::Parse(_) => Failure::Parse(format!("{}: {e}", path.display())),
        e => Failure::Compute(e.to_string()),
    })?;
    file.family.ring = file.family.ring.clone().with_field(field(o)?);
    Ok(file)
}

fn render(title: &str, seed: u64, reports: &[ConstancyReport], verdict: Option<Verdict>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title} (seed {seed})");
    for r in reports {
        let mut cells = vec![format!("0: {}", r.at_origin)];
        cells.extend(r.samples.iter().map(|x| format!("{}: {}", x.point, x.outcome)));
        let _ = writeln!(s, "  {:<30} {:<12} {}", r.invariant, r.verdict.to_string(), cells.join(" | "));
        for n in &r.notes {
            let _ = writeln!(s, "      {n}");
        }
    }
    if let Some(v) = verdict {
        let _ = writeln!(s, "verdict: {v}");
    }
    s
}

fn write_json(path: Option<&PathBuf>, value: &serde_json::Value) -> Result<(), Failure> {
    let Some(path) = path else { return Ok(()) };
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Compute(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn reports_json(reports: &[ConstancyReport]) -> serde_json::Value {
    serde_json::to_value(reports).expect("reports serialize")
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let o = &cli.opts;
    let cfg = check_config(o)?;
    let seed = o.seed;
    match &cli.command {
        Command::Invariants { file } => {
            let g = load(file, o)?;
            let reports = invariant_table(&g.family, &cfg)?;
            print!("{}", render(&format!("invariants {}", file.display()), seed, &reports, None));
            write_json(o.json.as_ref(), &reports_json(&reports))?;
            Ok(0)
        }
        Command::Check { condition, file } => {
            let g = load(file, o)?;
            let (name, out): (&str, CheckOutcome) = match condition {
                Condition::WhitneyA => ("check whitney-a", check_whitney_a(&g.family, &cfg)?),
                Condition::Af => ("check af", check_af(&g.family, &cfg)?),
                Condition::Wf => ("check wf", check_wf(&g.family, &cfg)?),
            };
            let title = format!("{name} {}", file.display());
            print!("{}", render(&title, seed, &out.reports, Some(out.verdict)));
            write_json(o.json.as_ref(), &reports_json(&out.reports))?;
            Ok(out.verdict.exit_code() as u8)
        }
        Command::ChainReport { file } => {
            let g = load(file, o)?;
            if g.chain.is_empty() {
                return Err(Failure::Usage(format!("{} declares no chain", file.display())));
            }
            let out = chain_milnor_report(&g.family, &g.chain, &cfg)?;
            let title = format!("chain-report {}", file.display());
            print!("{}", render(&title, seed, &out.reports, Some(out.verdict)));
            write_json(o.json.as_ref(), &reports_json(&out.reports))?;
            Ok(out.verdict.exit_code() as u8)
        }
        Command::ArcTest { file, arc } => {
            let g = load(file, o)?;
            let arc = g.arc(arc, o.trunc).map_err(|e| Failure::Usage(e.to_string()))?;
            arc_test(&g, &arc, file, o)
        }
    }
}

fn arc_test(g: &GermFile, arc: &icis::arc::Arc, file: &Path, o: &Opts) -> Result<u8, Failure> {
    let mut modules = g.modules.clone();
    let mut tests: Vec<(String, Vec<icis::ring::Polynomial>, String, bool)> = g
        .dependences
        .iter()
        .map(|d| (d.element.clone(), g.elements[&d.element].clone(), d.module.clone(), d.strict))
        .collect();
    if modules.is_empty() {
        // default: parameter partials strictly against JM(F)
        if g.family.p() != 1 || g.family.m() == 0 {
            return Err(Failure::Usage("no modules declared and no default test applies".into()));
        }
        modules.insert("JM(F)".into(), jacobian_module(&g.family, JacobianKind::Absolute)?);
        let param = jacobian_module(&g.family, JacobianKind::Param)?;
        for (k, col) in param.gens.iter().enumerate() {
            let name = format!("dF/d{}", g.family.ring.name(g.family.l() + k));
            tests.push((name, col.clone(), "JM(F)".into(), true));
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "arc-test {} --arc {} (truncation {})", file.display(), arc.name, arc.truncation_order);
    let mut code = 0u8;
    let mut mod_json = Vec::new();
    for (name, m) in &modules {
        let v = match pull_back_orders(m, arc) {
            Ok(p) => {
                let _ = writeln!(out, "  orders {name}: {p}");
                json!({"module": name, "orders": p.orders.iter().map(|x| x.to_string()).collect::<Vec<_>>()})
            }
            Err(e) => {
                code = 2;
                let _ = writeln!(out, "  orders {name}: error: {e}");
                json!({"module": name, "error": e.to_string()})
            }
        };
        mod_json.push(v);
    }
    let mut dep_json = Vec::new();
    for (h, col, m, strict) in &tests {
        let label = format!("{h} on {m}{}", if *strict { " (strict)" } else { "" });
        let v = match arc_dependence_test(col, &modules[m], arc, *strict) {
            Ok(d) => {
                if d == Dependence::Inconclusive {
                    code = 2;
                }
                let _ = writeln!(out, "  {label}: {d}");
                json!({"element": h, "module": m, "strict": strict, "result": d})
            }
            Err(e) => {
                code = 2;
                let _ = writeln!(out, "  {label}: error: {e}");
                json!({"element": h, "module": m, "strict": strict, "error": e.to_string()})
            }
        };
        dep_json.push(v);
    }
    print!("{out}");
    let doc = json!({
        "arc": arc.name,
        "truncation": arc.truncation_order,
        "seed": o.seed,
        "modules": mod_json,
        "dependence": dep_json,
    });
    write_json(o.json.as_ref(), &doc)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Parse(m)) => {
            eprintln!("parse error: {m}");
            ExitCode::from(EXIT_PARSE)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
