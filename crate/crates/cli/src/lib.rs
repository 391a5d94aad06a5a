//! The `cvl` command line: argument parsing, geometry loading, solver
//! dispatch and report assembly. `main.rs` only handles process I/O.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use cvl_core::ckem::{self, Family};
use cvl_core::geometry::{cone_to_json, parse_geometry, polytope_to_json, Geometry};
use cvl_core::polytope::exact::{to_f64, Rational};
use cvl_core::polytope::{MomentCone, Polytope};
use cvl_core::{sasaki, soliton, Error};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub mod catalog;

pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cvl", version, about = "Toric canonical-metric solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Leave the timing field out of the report.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and check a polytope or cone and print its invariants.
    Validate(ValidateArgs),
    /// Solve for the toric soliton vector field.
    Soliton(SolitonArgs),
    /// Multistart search for critical points of the EH functional.
    CkemCritical(CriticalArgs),
    /// Polynomial solution of the product-family boundary value problem.
    CkemOde(OdeArgs),
    /// Minimize the Reeb volume over the charge slice.
    SasakiReeb(ReebArgs),
    /// Dump EH over the admissible patch of the sphere as CSV.
    EhLandscape(LandscapeArgs),
}

#[derive(Debug, Args)]
pub struct PolytopeArg {
    /// Polytope JSON file or bundled example name.
    #[arg(long, value_name = "PATH")]
    pub polytope: String,

    /// Family parameter for the `product_p` and `blowup_p` examples.
    #[arg(long, value_name = "P")]
    pub param: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_name = "PATH", required_unless_present = "cone", conflicts_with = "cone")]
    pub polytope: Option<String>,

    #[arg(long, value_name = "PATH")]
    pub cone: Option<String>,

    #[arg(long, value_name = "P", conflicts_with = "cone")]
    pub param: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolitonArgs {
    #[command(flatten)]
    pub input: PolytopeArg,
    #[arg(long, default_value_t = soliton::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub input: PolytopeArg,
    #[arg(long, default_value_t = 200)]
    pub starts: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OdeArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ReebArgs {
    /// Cone JSON file or bundled example name.
    #[arg(long, value_name = "PATH")]
    pub cone: String,
    #[arg(long, default_value_t = sasaki::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    #[command(flatten)]
    pub input: PolytopeArg,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
}

/// A failed run: exit code plus a machine-readable reason.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    #[serde(skip)]
    pub code: i32,
    pub error: &'static str,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_PRECONDITION, error: "input", message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_convergence_failure() {
            Self { code: EXIT_NO_CONVERGENCE, error: "no_convergence", message: e.to_string() }
        } else {
            Self { code: EXIT_PRECONDITION, error: "precondition", message: e.to_string() }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: CommandEcho,
    /// SHA-256 of the canonical JSON of the parsed input.
    pub input_digest: String,
    pub output: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

/// Applies `CVL_THREADS` to the global worker pool. Unset or unparsable
/// values leave the default in place.
pub fn configure_threads() {
    if let Some(n) = std::env::var("CVL_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn load(name: &str) -> Result<(String, String), Failure> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{name}: {e}")))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        return Ok((stem, text));
    }
    catalog::lookup(name)
        .map(|(stem, text)| (stem.to_string(), text.to_string()))
        .ok_or_else(|| Failure::input(format!("{name}: no such file or bundled example")))
}

fn load_polytope(name: &str, param: Option<f64>) -> Result<Polytope, Failure> {
    let (stem, text) = load(name)?;
    if let Some(p) = param {
        let family = match stem.as_str() {
            "product_p" => Family::Product,
            "blowup_p" => Family::Blowup,
            _ => return Err(Failure::input("--param only applies to product_p and blowup_p")),
        };
        return Ok(ckem::family_polytope(family, p)?);
    }
    match parse_geometry(&text)? {
        Geometry::Polytope(p) => Ok(p),
        Geometry::Cone(_) => Err(Failure::input(format!("{name}: expected a polytope, found a cone"))),
    }
}

fn load_cone(name: &str) -> Result<MomentCone, Failure> {
    let (_, text) = load(name)?;
    match parse_geometry(&text)? {
        Geometry::Cone(c) => Ok(c),
        Geometry::Polytope(_) => Err(Failure::input(format!("{name}: expected a cone, found a polytope"))),
    }
}

fn digest(v: &Value) -> String {
    // serde_json maps are sorted, so this serialization is canonical.
    let bytes = serde_json::to_vec(v).expect("JSON values serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn exact(x: &Rational) -> Value {
    json!({ "exact": x.to_string(), "value": to_f64(x) })
}

fn validate_polytope(p: &Polytope) -> Value {
    json!({
        "kind": "polytope",
        "geometry": polytope_to_json(p),
        "volume": exact(&p.volume()),
        "boundary_measure": exact(&p.boundary_measure()),
        "delzant": p.validate_delzant(),
        "reflexive": p.validate_reflexive(),
        "origin_interior": p.check_origin_interior().is_ok(),
    })
}

fn validate_cone(c: &MomentCone) -> Value {
    json!({
        "kind": "cone",
        "geometry": cone_to_json(c),
        "slice_center": c.slice_center(),
    })
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// What a successful run produced.
pub enum Output {
    Report(RunReport),
    Csv(String),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Report(r) => {
                let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
                s.push('\n');
                s
            }
            Output::Csv(s) => s.clone(),
        }
    }
}

/// Runs one command. `args` is the argument list echoed into the report.
pub fn run(cli: &Cli, args: &[String]) -> Result<Output, Failure> {
    let start = Instant::now();
    let mut seed = None;
    let (name, input, output) = match &cli.command {
        Command::Validate(a) => {
            let (input, output) = match (&a.polytope, &a.cone) {
                (Some(p), None) => {
                    let p = load_polytope(p, a.param)?;
                    (polytope_to_json(&p), validate_polytope(&p))
                }
                (None, Some(c)) => {
                    let c = load_cone(c)?;
                    (cone_to_json(&c), validate_cone(&c))
                }
                _ => unreachable!("clap requires exactly one of --polytope, --cone"),
            };
            ("validate", input, output)
        }
        Command::Soliton(a) => {
            let p = load_polytope(&a.input.polytope, a.input.param)?;
            let sol = soliton::solve_soliton_field(&p, a.tol)?;
            let futaki = soliton::soliton_gradient(&p, &vec![0.0; p.dim()])?;
            let output = json!({
                "c": sol.c,
                "W": sol.potential_value,
                "gradient_norm": sol.gradient_norm,
                "hessian_condition": sol.hessian_condition,
                "iterations": sol.iterations,
                "futaki_at_zero": futaki,
            });
            ("soliton", polytope_to_json(&p), output)
        }
        Command::CkemCritical(a) => {
            let p = load_polytope(&a.input.polytope, a.input.param)?;
            let report = ckem::find_critical_points(&p, a.starts, a.seed)?;
            seed = Some(a.seed);
            ("ckem-critical", polytope_to_json(&p), to_value(report))
        }
        Command::CkemOde(a) => {
            let sol = ckem::solve_product_ode(a.m, a.c, a.tol)?;
            ("ckem-ode", json!({ "m": a.m, "c": a.c }), to_value(sol))
        }
        Command::SasakiReeb(a) => {
            let cone = load_cone(&a.cone)?;
            let result = sasaki::minimize_reeb_volume(&cone, a.tol)?;
            let center = cone.slice_center();
            let futaki = (1..cone.dim())
                .map(|k| {
                    let mut y = vec![0.0; cone.dim()];
                    y[k] = 1.0;
                    sasaki::sasaki_futaki(&cone, &center, &y)
                })
                .collect::<cvl_core::Result<Vec<f64>>>()?;
            let mut output = to_value(result);
            output["slice_center"] = json!(center);
            output["futaki_at_center"] = json!(futaki);
            ("sasaki-reeb", cone_to_json(&cone), output)
        }
        Command::EhLandscape(a) => {
            let p = load_polytope(&a.input.polytope, a.input.param)?;
            let mut csv = String::from("theta,phi,eh\n");
            for s in ckem::landscape(&p, a.grid)? {
                csv.push_str(&format!("{},{},{}\n", s.theta, s.phi, s.value));
            }
            return Ok(Output::Csv(csv));
        }
    };
    let timing = (!cli.no_timing).then(|| Timing { wall_seconds: start.elapsed().as_secs_f64() });
    Ok(Output::Report(RunReport {
        command: CommandEcho { name: name.to_string(), args: args.to_vec() },
        input_digest: digest(&input),
        output,
        timing,
        version: env!("CARGO_PKG_VERSION"),
        seed,
    }))
}
