//! `hv-periods`: monodromy tables, period identities, cycle searches and
//! integrality checks, reported as JSON.

mod cache;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hv_periods::contours::TensorPlane;
use hv_periods::hv_elliptic::{sl2z_conjecture_check, Phi, INTEGRALITY_TOLERANCE};
use hv_periods::hv_threefold::ThreefoldPeriods;
use hv_periods::numerics::elementary::pi;
use hv_periods::relations::{
    builtin_identity, find_gamma, verify_identity, ContourRef, GSpec, GammaOutcome, GammaResult, IdentitySpec,
    IdentityTerm, BUILTIN_IDENTITIES,
};
use hv_periods::transport::{ContourFile, Route};
use hv_periods::PrecisionContext;

use cache::Cache;
use report::{complex, integer_matrix, matrix, rational, sci};

const CONTROL: &str = "control-transcendental";
const BASIS: &str = "omega = P (f0, f0 log(lambda) + f1), P = [[2 pi i, 0], [-log(phi), 3]], principal log";

#[derive(Parser)]
#[command(name = "hv-periods", version, about = "Periods, monodromy and period identities of the Hulek-Verrill families")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Detour {
    Upper,
    Lower,
}

#[derive(Args, Clone, Debug, Serialize)]
struct Config {
    /// Fibre parameter, e.g. `1/64`, `2`, `1/10+1/10i`; repeat for `conjecture`
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Vec<String>,
    /// Working precision in decimal digits
    #[arg(long, global = true, default_value_t = 120)]
    digits: u32,
    /// Series truncation order
    #[arg(long, global = true, default_value_t = 400)]
    order: usize,
    /// Target tolerance for series tails and quadrature
    #[arg(long, global = true, default_value_t = 1e-40)]
    tolerance: f64,
    /// Side on which open contours pass interior singular points, and loop routes
    #[arg(long, global = true, value_enum, default_value_t = Detour::Upper)]
    detour: Detour,
    /// Largest denominator accepted in a recovered cycle vector
    #[arg(long, global = true, default_value_t = 4)]
    max_denominator: u64,
    /// Contour JSON used instead of a named contour
    #[arg(long, global = true)]
    contour_file: Option<PathBuf>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Result cache directory
    #[arg(long, global = true, env = "HV_PERIODS_CACHE_DIR")]
    #[serde(skip)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Cmd {
    /// Monodromy of omega(lambda, 1) (x) omega(lambda, phi) around every singular point
    Monodromy,
    /// Evaluate both sides of a period identity
    Identity {
        /// vanishing-1-9, vanishing-1-25 or t3-holomorphic
        name: Option<String>,
        /// Identity spec JSON
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Pairing `G` (four integers) for --contour-file
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        pairing: Option<Vec<i64>>,
        /// Claimed gamma (four rationals) for --contour-file
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gamma: Option<Vec<String>>,
    },
    /// Search the cycle vector gamma of an integral by lattice reduction
    Gamma {
        /// A named contour, or control-transcendental
        name: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        pairing: Option<Vec<i64>>,
        /// Lattice scales to try, in decimal digits
        #[arg(long, value_delimiter = ',', default_value = "40")]
        digits_used: Vec<u32>,
    },
    /// Integrality of the elliptic monodromies for each --phi
    Conjecture,
}

enum Failure {
    Config(String),
    Computation(String),
}

impl From<hv_periods::Error> for Failure {
    fn from(e: hv_periods::Error) -> Self {
        match e {
            // an ill-defined cycle is a bad input, not a numerical failure
            hv_periods::Error::NotInvariant => Failure::Config(e.to_string()),
            _ => Failure::Computation(e.to_string()),
        }
    }
}

struct Outcome {
    results: Value,
    violation: bool,
}

fn cfg_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn context(c: &Config) -> Result<PrecisionContext, Failure> {
    PrecisionContext::new(c.digits, c.order, c.tolerance).map_err(cfg_err)
}

fn single_phi(c: &Config, prec: u32) -> Result<(String, Phi), Failure> {
    let s = match c.phi.as_slice() {
        [] => "1/64".to_string(),
        [p] => p.clone(),
        _ => return Err(Failure::Config("this command takes a single --phi".into())),
    };
    let phi = Phi::parse(&s, prec).map_err(cfg_err)?;
    if phi.is_zero() {
        return Err(Failure::Config("phi must be nonzero".into()));
    }
    Ok((s, phi))
}

fn route(d: Detour) -> Route {
    match d {
        Detour::Upper => Route::Upper,
        Detour::Lower => Route::Lower,
    }
}

fn digits(ctx: &PrecisionContext) -> usize {
    ctx.tolerance_digits() as usize
}

fn monodromy(c: &Config) -> Result<Outcome, Failure> {
    let ctx = context(c)?;
    let (label, phi) = single_phi(c, ctx.bits())?;
    let d = digits(&ctx);
    let plane = TensorPlane::new(&phi, &ctx)?;
    let table = plane.monodromy_table(route(c.detour))?;
    let mut all = true;
    let rows: Vec<Value> = table
        .iter()
        .map(|m| {
            let integral = m.integer_deviation() < INTEGRALITY_TOLERANCE && m.det_deviation() < INTEGRALITY_TOLERANCE;
            all &= integral;
            json!({
                "label": m.label,
                "point": complex(&m.point, d),
                "left": matrix(&m.left, d, INTEGRALITY_TOLERANCE),
                "right": matrix(&m.right, d, INTEGRALITY_TOLERANCE),
                "kron": integer_matrix(&m.kron(), INTEGRALITY_TOLERANCE),
                "det_deviation": sci(m.det_deviation()),
                "integral": integral,
            })
        })
        .collect();
    Ok(Outcome {
        results: json!({
            "phi": label,
            "basis": BASIS,
            "convention": "mu = left (x) right acts on omega(lambda,1) (x) omega(lambda,phi) as omega -> mu omega",
            "branch": format!("anticlockwise standard loops from the basepoint through the {:?} half plane", c.detour).to_lowercase(),
            "basepoint": complex(plane.basepoint(), d),
            "singularities": rows,
            "all_integral": all,
        }),
        violation: !all,
    })
}

fn inline_spec(c: &Config, phi: &str, pairing: &Option<Vec<i64>>, gamma: Option<Vec<String>>) -> Result<IdentitySpec, Failure> {
    let path = c.contour_file.as_ref().unwrap();
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let file = ContourFile::from_json(&text).map_err(cfg_err)?;
    let g = match pairing.as_deref() {
        Some([a, b, c, d]) => [*a, *b, *c, *d],
        _ => return Err(Failure::Config("--contour-file needs --pairing with four integers".into())),
    };
    Ok(IdentitySpec {
        name: path.display().to_string(),
        gamma,
        phi: phi.into(),
        terms: vec![IdentityTerm { g: GSpec::Flat(g), contour: ContourRef::Inline(file) }],
    })
}

fn resolve_spec(
    c: &Config,
    name: &Option<String>,
    spec: &Option<PathBuf>,
    pairing: &Option<Vec<i64>>,
    gamma: Option<Vec<String>>,
    phi: &str,
) -> Result<IdentitySpec, Failure> {
    match (name, spec, &c.contour_file) {
        (Some(n), None, None) => {
            if !BUILTIN_IDENTITIES.contains(&n.as_str()) && n != "t3-circle" {
                return Err(Failure::Config(format!("unknown identity {n}; known: {}", BUILTIN_IDENTITIES.join(", "))));
            }
            builtin_identity(n, phi).map_err(cfg_err)
        }
        (None, Some(p), None) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            IdentitySpec::from_json(&text).map_err(cfg_err)
        }
        (None, None, Some(_)) => inline_spec(c, phi, pairing, gamma),
        _ => Err(Failure::Config("give exactly one of NAME, --spec or --contour-file".into())),
    }
}

fn identity(c: &Config, name: &Option<String>, spec: &Option<PathBuf>, pairing: &Option<Vec<i64>>, gamma: &Option<Vec<String>>) -> Result<Outcome, Failure> {
    let ctx = context(c)?;
    let (label, _) = single_phi(c, ctx.bits())?;
    let spec = resolve_spec(c, name, spec, pairing, gamma.clone(), &label)?;
    if spec.gamma().map_err(cfg_err)?.is_none() {
        return Err(Failure::Config("the identity needs a claimed gamma".into()));
    }
    let d = digits(&ctx);
    let r = verify_identity(&spec, &ctx, route(c.detour))?;
    let residual = r.residual.unwrap();
    let threshold = 1e3 * c.tolerance;
    let terms: Vec<Value> = r
        .terms
        .iter()
        .map(|t| {
            json!({
                "contour": t.contour, "G": t.g, "closed": t.closed, "invariant": t.invariant,
                "value": complex(&t.value, d), "node_count": t.node_count, "error_estimate": sci(t.error_estimate),
            })
        })
        .collect();
    Ok(Outcome {
        results: json!({
            "name": r.name,
            "phi": spec.phi,
            "detour": c.detour,
            "gamma": r.gamma.as_ref().unwrap().iter().map(rational).collect::<Vec<_>>(),
            "lhs": complex(r.lhs.as_ref().unwrap(), d),
            "rhs": complex(&r.rhs, d),
            "residual": sci(residual),
            "threshold": sci(threshold),
            "holds": residual < threshold,
            "pi": r.pi.iter().map(|p| complex(p, d)).collect::<Vec<_>>(),
            "terms": terms,
        }),
        violation: residual >= threshold,
    })
}

fn gamma_json(g: &GammaResult) -> Value {
    json!({
        "gamma": g.gamma.iter().map(rational).collect::<Vec<_>>(),
        "residual": sci(g.residual),
        "relation": g.relation.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "relation_norm": sci(g.relation_norm),
        "separation": sci(g.separation),
    })
}

fn gamma(c: &Config, name: &Option<String>, spec: &Option<PathBuf>, pairing: &Option<Vec<i64>>, digits_used: &[u32]) -> Result<Outcome, Failure> {
    let ctx = context(c)?;
    let (label, phi) = single_phi(c, ctx.bits())?;
    if let Some(&du) = digits_used.iter().find(|&&du| du + 20 > c.digits) {
        return Err(Failure::Config(format!("digits_used {du} needs --digits of at least {}", du + 20)));
    }
    let d = digits(&ctx);
    let (rhs, pi_v, what) = if name.as_deref() == Some(CONTROL) {
        let pi_v = ThreefoldPeriods::new(&ctx)?.pi_vector(&phi.value(ctx.bits()))?;
        (pi_v[0].mul_real(&pi(ctx.bits())), pi_v, "pi * Pi_1".to_string())
    } else {
        let mut spec = resolve_spec(c, name, spec, pairing, None, &label)?;
        spec.gamma = None;
        let r = verify_identity(&spec, &ctx, route(c.detour))?;
        (r.rhs, r.pi, spec.name)
    };
    let mut found: Vec<Vec<String>> = Vec::new();
    let runs: Vec<Value> = digits_used
        .iter()
        .map(|&du| {
            let out = find_gamma(&rhs, &pi_v, c.max_denominator, du)?;
            Ok(match out {
                GammaOutcome::Found(g) => {
                    found.push(g.gamma.iter().map(rational).collect());
                    json!({"digits_used": du, "outcome": "found", "result": gamma_json(&g)})
                }
                GammaOutcome::Ambiguous(g) => json!({"digits_used": du, "outcome": "ambiguous", "result": gamma_json(&g)}),
                GammaOutcome::NoRelation { shortest_norm, reason } => {
                    json!({"digits_used": du, "outcome": "no-relation", "shortest_norm": sci(shortest_norm), "reason": reason})
                }
            })
        })
        .collect::<Result<_, Failure>>()?;
    let stable = found.len() == digits_used.len() && found.windows(2).all(|w| w[0] == w[1]);
    Ok(Outcome {
        results: json!({
            "target": what,
            "phi": label,
            "detour": c.detour,
            "max_denominator": c.max_denominator,
            "rhs": complex(&rhs, d),
            "runs": runs,
            "stable": stable,
        }),
        violation: false,
    })
}

fn conjecture(c: &Config) -> Result<Outcome, Failure> {
    if c.phi.is_empty() {
        return Err(Failure::Config("conjecture needs at least one --phi".into()));
    }
    let ctx = context(c)?;
    let d = digits(&ctx);
    let mut all = true;
    let mut rows = Vec::new();
    for s in &c.phi {
        let phi = Phi::parse(s, ctx.bits()).map_err(cfg_err)?;
        if phi.is_zero() {
            return Err(Failure::Config("phi must be nonzero".into()));
        }
        let r = sl2z_conjecture_check(&phi, &ctx)?;
        all &= r.integral();
        rows.push(json!({
            "phi": s,
            "basepoint": complex(&r.basepoint, d),
            "monodromies": r.monodromies.iter().map(|m| json!({
                "label": m.label,
                "point": complex(&m.location, d),
                "matrix": matrix(&m.matrix, d, INTEGRALITY_TOLERANCE),
                "det_deviation": sci(m.det_deviation),
                "integral": m.is_integral(),
            })).collect::<Vec<_>>(),
            "loop_product_deviation": sci(r.relation_deviation),
            "integral": r.integral(),
        }));
    }
    Ok(Outcome {
        results: json!({
            "tolerance": sci(INTEGRALITY_TOLERANCE),
            "basis": BASIS,
            "branch": "anticlockwise standard loops from the basepoint through the upper half plane",
            "results": rows,
            "all_integral": all,
        }),
        violation: !all,
    })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let c = &cli.config;
    match &cli.command {
        Cmd::Monodromy => monodromy(c),
        Cmd::Identity { name, spec, pairing, gamma } => identity(c, name, spec, pairing, gamma),
        Cmd::Gamma { name, spec, pairing, digits_used } => gamma(c, name, spec, pairing, digits_used),
        Cmd::Conjecture => conjecture(c),
    }
}

fn command_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::Monodromy => "monodromy",
        Cmd::Identity { .. } => "identity",
        Cmd::Gamma { .. } => "gamma",
        Cmd::Conjecture => "conjecture",
    }
}

/// Everything that determines the results, including input file contents.
fn cache_material(cli: &Cli) -> Value {
    let read = |p: &Option<PathBuf>| p.as_ref().map(|p| std::fs::read_to_string(p).unwrap_or_default());
    let spec = match &cli.command {
        Cmd::Identity { spec, .. } | Cmd::Gamma { spec, .. } => read(spec),
        _ => None,
    };
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command,
        "config": cli.config,
        "contour_file": read(&cli.config.contour_file),
        "spec": spec,
    })
}

fn emit(v: &Value, out: &Option<PathBuf>) -> std::io::Result<()> {
    let s = serde_json::to_string_pretty(v).expect("json");
    match out {
        Some(p) => std::fs::write(p, s + "\n"),
        None => writeln!(std::io::stdout(), "{s}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let name = command_name(&cli.command);
    let cache = cli.config.cache_dir.as_ref().map(|d| Cache::new(d));
    let key = Cache::key(&cache_material(&cli));
    let hit = cache.as_ref().and_then(|c| c.load(&key));
    let (result, cached) = match hit {
        Some(v) => (Ok(Outcome { violation: v["violation"].as_bool().unwrap_or(false), results: v["results"].clone() }), true),
        None => (run(&cli), false),
    };
    let mut report = json!({
        "command": name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cli.config,
        "arguments": cli.command,
    });
    let code = match result {
        Ok(o) => {
            if let (Some(c), false) = (&cache, cached) {
                if let Err(e) = c.store(&key, &json!({"results": o.results, "violation": o.violation})) {
                    eprintln!("warning: cache write failed: {e}");
                }
            }
            report["results"] = o.results;
            report["status"] = json!(if o.violation { "violation" } else { "ok" });
            if o.violation { 3 } else { 0 }
        }
        Err(Failure::Config(m)) => {
            report["status"] = json!("configuration-error");
            report["error"] = json!(m);
            2
        }
        Err(Failure::Computation(m)) => {
            report["status"] = json!("computation-failed");
            report["error"] = json!(m);
            1
        }
    };
    report["cached"] = json!(cached);
    report["timing_ms"] = json!(start.elapsed().as_millis() as u64);
    if let Err(e) = emit(&report, &cli.config.out) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if code != 0 {
        if let Some(m) = report["error"].as_str() {
            eprintln!("error: {m}");
        }
    }
    ExitCode::from(code)
}
