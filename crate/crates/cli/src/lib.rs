//! Command-line surface for the `floqca` library.
//!
//! Subcommands:
//!
//! * `dioph {hubbard, nn3, tower, dmax4-search, general}` — exact integer
//!   solutions and derived drive parameters.
//! * `ca {evolve, frozen, decompose}` — deterministic cellular-automaton
//!   dynamics on built-in lattices.
//! * `ed run` — exact diagonalization of a chain sector (CSV output).
//! * `report` — bundled fragmentation report for a chain sector (JSON).
//!
//! Conventions:
//!
//! * Parameters `V` and `tau` accept symbolic tokens (`"sqrt(12)"`, `"pi/2"`,
//!   `"pi*3/2"`, `"4pi"`, `"inf"`) so solvable points are hit at full double
//!   precision, plus plain decimal literals.
//! * Every output carries a provenance header (tool version, hash of the
//!   resolved configuration, seed).
//! * Numeric fields are rounded to 12 significant digits on emission.
//! * Exit codes: 0 = success or a valid scientific result (including
//!   `NonDeterministic`), 1 = usage / unsatisfiable input, 2 = resource
//!   guard (sector too large).

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use floqca::ca::{
    enumerate_frozen, evolve_periods, krylov_decompose, make_rule_table, CaError, EvolveOutcome,
    ModelKind, OrbitClass, RuleTable, DEFAULT_SECTOR_GUARD,
};
use floqca::dioph::{
    dmax4_certificate, general_nn_solution, hubbard_params, hubbard_solution, nn_dmax3_solution,
    nn_params, nn_tower_extend, search_dmax4, Direction,
};
use floqca::ed::{
    floquet_operator, fragmentation_report, quasispectrum, spacing_ratios, write_eigenstate_csv,
    write_ratio_csv, EdError, SectorBasis,
};
use floqca::lattice::{build_chain, build_lieb, Boundary, DriveSchedule, FockState, Lattice};
use floqca::pairdyn::DriveParams;

/// Reference tuple reported by `dioph dmax4-search` whenever it lies within
/// the requested bounds; its verdict is computed, never assumed.
pub const DMAX4_REFERENCE: (i128, i128, i128) = (3, 9471, 4_305_592_257);

// ---------------------------------------------------------------------------
// argument surface
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "floqca",
    version,
    about = "Solvable points, cellular-automaton dynamics, and fragmentation \
             diagnostics for sequentially activated Floquet lattice models"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact integer solutions of the solvability conditions
    #[command(subcommand)]
    Dioph(DiophCmd),
    /// Deterministic cellular-automaton dynamics
    #[command(subcommand)]
    Ca(CaCmd),
    /// Exact diagonalization of a chain sector
    #[command(subcommand)]
    Ed(EdCmd),
    /// Bundled fragmentation report for a chain sector
    Report(ReportArgs),
}

#[derive(Subcommand, Debug)]
enum DiophCmd {
    /// Hubbard family: (ell, n, m) and (tau, V) from a direction (w1, w2, d)
    Hubbard(DirArgs),
    /// Nearest-neighbour D_max = 3 family: (m0, m1, m2) and (tau, V)
    Nn3(DirArgs),
    /// Extend a tower: the integer m_l solving 4 m_l^2 = (1-l^2) m0^2 + 4 l^2 m1^2, if any
    Tower(TowerArgs),
    /// Exhaustive certified search of the D_max = 4 quartic over a (w1, w2) grid
    #[command(name = "dmax4-search")]
    Dmax4Search(Dmax4Args),
    /// General three-delta solution family
    General(GeneralArgs),
}

#[derive(Args, Debug)]
struct DirArgs {
    #[arg(long, allow_hyphen_values = true)]
    w1: i128,
    #[arg(long, allow_hyphen_values = true)]
    w2: i128,
    /// Direction scale (nonzero); defaults to 1
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    d: i128,
}

#[derive(Args, Debug)]
struct TowerArgs {
    #[arg(long, allow_hyphen_values = true)]
    m0: i128,
    #[arg(long, allow_hyphen_values = true)]
    m1: i128,
    /// Tower index l >= 2
    #[arg(long)]
    l: u32,
}

#[derive(Args, Debug)]
struct Dmax4Args {
    #[arg(long = "w1-max")]
    w1_max: i128,
    #[arg(long = "w2-max")]
    w2_max: i128,
}

#[derive(Args, Debug)]
struct GeneralArgs {
    /// Comma-separated deltas, e.g. "0,1,2"
    #[arg(long)]
    deltas: String,
    #[arg(long, allow_hyphen_values = true)]
    w1: i128,
    #[arg(long, allow_hyphen_values = true)]
    w2: i128,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    d: i128,
}

#[derive(Subcommand, Debug)]
enum CaCmd {
    /// Evolve one Fock state over full drive periods
    Evolve(CaEvolveArgs),
    /// Enumerate the frozen states of a number sector
    Frozen(CaSectorArgs),
    /// Decompose a number sector into orbits and the quantum-touching block
    Decompose(CaSectorArgs),
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    /// Built-in model: "chain" or "lieb"
    #[arg(long)]
    model: Option<String>,
    /// Chain length (model = chain)
    #[arg(long)]
    n: Option<usize>,
    /// Unit cells in x (model = lieb)
    #[arg(long)]
    lx: Option<usize>,
    /// Unit cells in y (model = lieb)
    #[arg(long)]
    ly: Option<usize>,
    /// "open" (default) or "periodic"
    #[arg(long)]
    boundary: Option<String>,
    /// Drive parameters, e.g. "V=sqrt(12),tau=pi/2"
    #[arg(long)]
    params: Option<String>,
    /// JSON run-config file supplying defaults for omitted flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CaEvolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// JSON file {"bits": "0101..."} with one character per site
    #[arg(long)]
    state: Option<PathBuf>,
    /// Inline occupancy bitstring; defaults to the empty state
    #[arg(long)]
    bits: Option<String>,
    #[arg(long, default_value_t = 64)]
    max_periods: usize,
}

#[derive(Args, Debug)]
struct CaSectorArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Particle number
    #[arg(long)]
    k: Option<usize>,
    /// Maximum periods to follow per state (decompose)
    #[arg(long, default_value_t = 4096)]
    max_periods: usize,
}

#[derive(Subcommand, Debug)]
enum EdCmd {
    /// Diagonalize one chain sector and write the eigenstate table
    Run(EdArgs),
}

#[derive(Args, Debug)]
struct EdArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "V")]
    v: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    boundary: Option<String>,
    /// Disorder strength for the diagonal dephasing layer (optional)
    #[arg(long)]
    disorder: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Eigenstate CSV path: index,quasienergy,entropy,frozen
    #[arg(long)]
    out: Option<PathBuf>,
    /// Spacing-ratio CSV path (frozen levels masked): r
    #[arg(long = "ratios-out")]
    ratios_out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "V")]
    v: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    boundary: Option<String>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// run configuration
// ---------------------------------------------------------------------------

/// On-disk run configuration; any field may be omitted, unknown fields are
/// rejected. Command-line flags override file values.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: Option<String>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub lx: Option<usize>,
    pub ly: Option<usize>,
    pub boundary: Option<String>,
    /// Symbolic or decimal token, e.g. "sqrt(12)"
    pub v: Option<String>,
    /// Symbolic or decimal token, e.g. "pi/2"
    pub tau: Option<String>,
    pub disorder: Option<f64>,
    pub seed: Option<u64>,
    pub max_periods: Option<usize>,
    pub state: Option<String>,
    pub out: Option<String>,
    pub ratios_out: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    bits: String,
}

/// CLI failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: 1, message: msg.into() }
    }
    fn resource(msg: impl Into<String>) -> Self {
        CliError { code: 2, message: msg.into() }
    }
}

impl From<floqca::dioph::DiophError> for CliError {
    fn from(e: floqca::dioph::DiophError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<floqca::lattice::LatticeError> for CliError {
    fn from(e: floqca::lattice::LatticeError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<CaError> for CliError {
    fn from(e: CaError) -> Self {
        match e {
            CaError::SectorTooLarge { .. } => CliError::resource(e.to_string()),
            CaError::PeriodNotFound(_) => CliError::usage(e.to_string()),
        }
    }
}

impl From<EdError> for CliError {
    fn from(e: EdError) -> Self {
        match e {
            EdError::SectorTooLarge { .. } => CliError::resource(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(format!("i/o error: {e}"))
    }
}

// ---------------------------------------------------------------------------
// symbolic parameter tokens
// ---------------------------------------------------------------------------

/// Parses a parameter token: decimal literal, `sqrt(K)`, `pi`, `pi/Q`,
/// `pi*R`, `R*pi`, `Rpi` (R a decimal or `P/Q` rational), or `inf`.
/// Symbolic forms evaluate exactly once in double precision.
pub fn parse_param_token(token: &str) -> Result<f64, String> {
    let t = token.trim();
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, t),
    };
    let bad = || format!("cannot parse parameter token '{token}'");
    let rational = |s: &str| -> Result<f64, String> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            Ok(p / q)
        } else {
            s.parse().map_err(|_| bad())
        }
    };
    let v = if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        f64::INFINITY
    } else if let Some(inner) = t.strip_prefix("sqrt(").and_then(|s| s.strip_suffix(')')) {
        let x = rational(inner)?;
        if x < 0.0 {
            return Err(bad());
        }
        x.sqrt()
    } else if t == "pi" {
        std::f64::consts::PI
    } else if let Some(rest) = t.strip_prefix("pi*") {
        std::f64::consts::PI * rational(rest)?
    } else if let Some(rest) = t.strip_prefix("pi/") {
        std::f64::consts::PI / rational(rest)?
    } else if let Some(rest) = t.strip_suffix("*pi") {
        rational(rest)? * std::f64::consts::PI
    } else if let Some(rest) = t.strip_suffix("pi") {
        rational(rest)? * std::f64::consts::PI
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    Ok(sign * v)
}

/// Parses a `"V=...,tau=..."` parameter string.
pub fn parse_params_string(s: &str) -> Result<(f64, f64), String> {
    let mut v: Option<f64> = None;
    let mut tau: Option<f64> = None;
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in params, got '{part}'"))?;
        match key.trim().to_ascii_lowercase().as_str() {
            "v" => v = Some(parse_param_token(val)?),
            "tau" => tau = Some(parse_param_token(val)?),
            other => return Err(format!("unknown parameter key '{other}'")),
        }
    }
    match (v, tau) {
        (Some(v), Some(tau)) => Ok((v, tau)),
        _ => Err("params must set both V and tau".to_string()),
    }
}

fn parse_boundary(s: &str) -> Result<Boundary, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "open" => Ok(Boundary::Open),
        "periodic" => Ok(Boundary::Periodic),
        other => Err(CliError::usage(format!(
            "unknown boundary '{other}' (expected open|periodic)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// provenance and numeric emission
// ---------------------------------------------------------------------------

/// Rounds to 12 significant digits so repeated runs emit identical text
/// despite floating noise below 1e-9.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

/// Recursively rounds every floating-point number in a JSON value.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if !n.is_i64() && !n.is_u64() {
                if let Some(f) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round12(f)) {
                        *v = Value::Number(r);
                    }
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

/// 64-bit FNV-1a, used to fingerprint the resolved configuration.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn provenance(resolved: &Value, seed: u64) -> Value {
    json!({
        "tool": "floqca",
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": format!("{:016x}", fnv1a64(resolved.to_string().as_bytes())),
        "seed": seed,
    })
}

fn emit_json(mut body: Value, resolved: &Value, seed: u64) -> String {
    round_json(&mut body);
    if let Value::Object(map) = &mut body {
        map.insert("provenance".into(), provenance(resolved, seed));
    }
    serde_json::to_string_pretty(&body).expect("serialization")
}

fn csv_provenance(resolved: &Value, seed: u64) -> String {
    format!(
        "# tool: floqca {}\n# config_hash: {:016x}\n# seed: {}\n",
        env!("CARGO_PKG_VERSION"),
        fnv1a64(resolved.to_string().as_bytes()),
        seed
    )
}

// ---------------------------------------------------------------------------
// model resolution
// ---------------------------------------------------------------------------

struct ResolvedModel {
    lattice: Lattice,
    schedule: DriveSchedule,
    rules: RuleTable,
    model_name: String,
    v: f64,
    tau: f64,
    resolved: Value,
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("invalid config {}: {e}", p.display())))
        }
    }
}

fn resolve_model(args: &ModelArgs) -> Result<ResolvedModel, CliError> {
    let cfg = load_config(&args.config)?;
    let model = args
        .model
        .clone()
        .or(cfg.model.clone())
        .ok_or_else(|| CliError::usage("missing --model (chain|lieb)"))?;
    let boundary_str = args
        .boundary
        .clone()
        .or(cfg.boundary.clone())
        .unwrap_or_else(|| "open".to_string());
    let boundary = parse_boundary(&boundary_str)?;
    let params_str = match (&args.params, &cfg.v, &cfg.tau) {
        (Some(p), _, _) => p.clone(),
        (None, Some(v), Some(tau)) => format!("V={v},tau={tau}"),
        _ => return Err(CliError::usage("missing --params \"V=...,tau=...\"")),
    };
    let (v, tau) = parse_params_string(&params_str).map_err(CliError::usage)?;

    let (lattice, schedule, kind, geometry) = match model.as_str() {
        "chain" => {
            let n = args
                .n
                .or(cfg.n)
                .ok_or_else(|| CliError::usage("model chain requires --n"))?;
            let (l, s) = build_chain(n, boundary)?;
            (l, s, ModelKind::NnChain, json!({"n": n}))
        }
        "lieb" => {
            let lx = args
                .lx
                .or(cfg.lx)
                .ok_or_else(|| CliError::usage("model lieb requires --lx"))?;
            let ly = args
                .ly
                .or(cfg.ly)
                .ok_or_else(|| CliError::usage("model lieb requires --ly"))?;
            let (l, s) = build_lieb(lx, ly, boundary)?;
            (l, s, ModelKind::NnLieb, json!({"lx": lx, "ly": ly}))
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown model '{other}' (expected chain|lieb)"
            )))
        }
    };
    let params = if v.is_infinite() {
        DriveParams::hard_core(tau)
    } else {
        DriveParams::new(v, tau)
    };
    let rules = make_rule_table(kind, &params, 1e-9);
    let resolved = json!({
        "model": model,
        "geometry": geometry,
        "boundary": boundary_str.to_ascii_lowercase(),
        "v": v,
        "tau": tau,
    });
    Ok(ResolvedModel { lattice, schedule, rules, model_name: model, v, tau, resolved })
}

// ---------------------------------------------------------------------------
// subcommand bodies (each returns the stdout payload)
// ---------------------------------------------------------------------------

fn cmd_dioph(cmd: &DiophCmd) -> Result<String, CliError> {
    let (body, resolved) = match cmd {
        DiophCmd::Hubbard(a) => {
            let dir = Direction::normalized(a.w1, a.w2, a.d)?;
            let (ell, n, m) = hubbard_solution(&dir);
            let point = hubbard_params(&dir)?;
            (
                json!({
                    "family": "hubbard",
                    "w1": dir.w1, "w2": dir.w2, "d": dir.d,
                    "ell": ell, "n": n, "m": m,
                    "tau": point.tau,
                    "tau_over_pi": point.tau / std::f64::consts::PI,
                    "v": point.v,
                    "parity": point.parity,
                }),
                json!({"cmd": "dioph hubbard", "w1": a.w1, "w2": a.w2, "d": a.d}),
            )
        }
        DiophCmd::Nn3(a) => {
            let dir = Direction::normalized(a.w1, a.w2, a.d)?;
            let (m0, m1, m2) = nn_dmax3_solution(&dir)?;
            // the integer tuple always exists; (tau, V) only when the root
            // is real (4 m1^2 >= m0^2)
            let point = nn_params(m0, m1).ok();
            (
                json!({
                    "family": "nn-dmax3",
                    "w1": dir.w1, "w2": dir.w2, "d": dir.d,
                    "m": [m0, m1, m2],
                    "tau": point.as_ref().map(|p| p.tau),
                    "tau_over_pi": point.as_ref().map(|p| p.tau / std::f64::consts::PI),
                    "v": point.as_ref().map(|p| p.v),
                    "real_v": point.is_some(),
                }),
                json!({"cmd": "dioph nn3", "w1": a.w1, "w2": a.w2, "d": a.d}),
            )
        }
        DiophCmd::Tower(a) => {
            if a.l < 2 {
                return Err(CliError::usage("tower index l must be >= 2"));
            }
            let m_l = nn_tower_extend(a.m0, a.m1, a.l);
            (
                json!({
                    "family": "nn-tower",
                    "m0": a.m0, "m1": a.m1, "l": a.l,
                    "m_l": m_l,
                    "solvable": m_l.is_some(),
                }),
                json!({"cmd": "dioph tower", "m0": a.m0, "m1": a.m1, "l": a.l}),
            )
        }
        DiophCmd::Dmax4Search(a) => {
            if a.w1_max < 1 || a.w2_max < 1 {
                return Err(CliError::usage("search bounds must be >= 1"));
            }
            // `rhs` can exceed 64 bits, so it is emitted as a decimal string
            let cert_json = |c: &floqca::dioph::Dmax4Certificate| {
                json!({
                    "w1": c.w1 as i64, "w2": c.w2 as i64,
                    "rhs": c.rhs.to_string(),
                    "m3": c.m3.map(|m| m.to_string()),
                    "degenerate": c.degenerate,
                    "trivial_v": c.trivial_v,
                })
            };
            let solutions: Vec<Value> =
                search_dmax4(a.w1_max, a.w2_max)?.iter().map(cert_json).collect();
            let (rw1, rw2, rm3) = DMAX4_REFERENCE;
            let reference = if a.w1_max >= rw1 && a.w2_max >= rw2 {
                let cert = dmax4_certificate(rw1, rw2)?;
                let mut r = cert_json(&cert);
                r["claimed_m3"] = json!(rm3.to_string());
                r["claim_verified"] = json!(cert.m3 == Some(rm3));
                Some(r)
            } else {
                None
            };
            (
                json!({
                    "family": "nn-dmax4",
                    "w1_max": a.w1_max, "w2_max": a.w2_max,
                    "solutions": solutions,
                    "reference_point": reference,
                }),
                json!({"cmd": "dioph dmax4-search", "w1_max": a.w1_max, "w2_max": a.w2_max}),
            )
        }
        DiophCmd::General(a) => {
            let parts: Result<Vec<i128>, _> =
                a.deltas.split(',').map(|s| s.trim().parse::<i128>()).collect();
            let parts = parts.map_err(|_| CliError::usage("cannot parse --deltas"))?;
            let deltas: [i128; 3] = parts
                .try_into()
                .map_err(|_| CliError::usage("--deltas must list exactly three values"))?;
            let dir = Direction::normalized(a.w1, a.w2, a.d)?;
            let (m0, m1, m2) = general_nn_solution(deltas, &dir)?;
            (
                json!({
                    "family": "nn-general",
                    "deltas": deltas,
                    "w1": dir.w1, "w2": dir.w2, "d": dir.d,
                    "m": [m0, m1, m2],
                }),
                json!({"cmd": "dioph general", "deltas": deltas, "w1": a.w1, "w2": a.w2, "d": a.d}),
            )
        }
    };
    Ok(emit_json(body, &resolved, 0))
}

fn cmd_ca(cmd: &CaCmd) -> Result<String, CliError> {
    match cmd {
        CaCmd::Evolve(a) => {
            let m = resolve_model(&a.model)?;
            let cfg = load_config(&a.model.config)?;
            let bits = if let Some(path) = &a.state {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::usage(format!("cannot read state {}: {e}", path.display()))
                })?;
                let sf: StateFile = serde_json::from_str(&text)
                    .map_err(|e| CliError::usage(format!("invalid state file: {e}")))?;
                sf.bits
            } else if let Some(b) = &a.bits {
                b.clone()
            } else if let Some(b) = &cfg.state {
                b.clone()
            } else {
                "0".repeat(m.lattice.n_sites)
            };
            let state = FockState::from_bitstring(&bits)?;
            if state.n_sites != m.lattice.n_sites {
                return Err(CliError::usage(format!(
                    "state has {} sites but the lattice has {}",
                    state.n_sites, m.lattice.n_sites
                )));
            }
            let max_periods = cfg.max_periods.unwrap_or(a.max_periods);
            let outcome =
                evolve_periods(&state, &m.schedule, &m.rules, &m.lattice, max_periods);
            let outcome_json = match outcome {
                Ok(EvolveOutcome::Orbit(o)) => json!({
                    "type": "orbit",
                    "period": o.period,
                    "class": o.class,
                    "states": o.states.iter().map(|s| s.to_bitstring()).collect::<Vec<_>>(),
                }),
                Ok(EvolveOutcome::NonDeterministic { after_periods, detail }) => json!({
                    "type": "non_deterministic",
                    "after_periods": after_periods,
                    "step": detail.step,
                    "pair": detail.pair,
                    "delta": detail.delta,
                    "reason": detail.reason,
                }),
                Err(CaError::PeriodNotFound(n)) => json!({
                    "type": "no_return",
                    "max_periods": n,
                }),
                Err(e) => return Err(e.into()),
            };
            let resolved = json!({"cmd": "ca evolve", "model": m.resolved, "state": bits,
                                  "max_periods": max_periods});
            let body = json!({
                "model": m.model_name,
                "n_sites": m.lattice.n_sites,
                "v": m.v, "tau": m.tau,
                "initial_state": bits,
                "outcome": outcome_json,
            });
            Ok(emit_json(body, &resolved, 0))
        }
        CaCmd::Frozen(a) => {
            let m = resolve_model(&a.model)?;
            let cfg = load_config(&a.model.config)?;
            let k = a
                .k
                .or(cfg.k)
                .ok_or_else(|| CliError::usage("missing --k (particle number)"))?;
            let frozen =
                enumerate_frozen(&m.lattice, &m.schedule, &m.rules, k, DEFAULT_SECTOR_GUARD)?;
            let resolved = json!({"cmd": "ca frozen", "model": m.resolved, "k": k});
            let body = json!({
                "model": m.model_name,
                "n_sites": m.lattice.n_sites,
                "k": k,
                "v": m.v, "tau": m.tau,
                "count": frozen.len(),
                "states": frozen.iter().map(|s| s.to_bitstring()).collect::<Vec<_>>(),
            });
            Ok(emit_json(body, &resolved, 0))
        }
        CaCmd::Decompose(a) => {
            let m = resolve_model(&a.model)?;
            let cfg = load_config(&a.model.config)?;
            let k = a
                .k
                .or(cfg.k)
                .ok_or_else(|| CliError::usage("missing --k (particle number)"))?;
            let max_periods = cfg.max_periods.unwrap_or(a.max_periods);
            let dec = krylov_decompose(
                &m.lattice,
                &m.schedule,
                &m.rules,
                k,
                max_periods,
                DEFAULT_SECTOR_GUARD,
            )?;
            let frozen = dec.frozen_states();
            let ca_orbits: Vec<Value> = dec
                .orbits
                .iter()
                .filter(|o| o.class == OrbitClass::Ca)
                .map(|o| {
                    json!({
                        "representative": o.representative.to_bitstring(),
                        "period": o.period,
                    })
                })
                .collect();
            let quantum_fraction = dec.quantum_touching.len() as f64 / dec.dim as f64;
            let resolved = json!({"cmd": "ca decompose", "model": m.resolved, "k": k});
            let body = json!({
                "model": m.model_name,
                "n_sites": dec.n_sites,
                "k": dec.k,
                "v": m.v, "tau": m.tau,
                "dim": dec.dim.to_string(),
                "frozen_count": frozen.len(),
                "frozen_states": frozen.iter().map(|s| s.to_bitstring()).collect::<Vec<_>>(),
                "ca_orbit_count": ca_orbits.len(),
                "ca_orbits": ca_orbits,
                "quantum_touching_count": dec.quantum_touching.len(),
                "quantum_fraction": quantum_fraction,
            });
            Ok(emit_json(body, &resolved, 0))
        }
    }
}

fn cmd_ed(a: &EdArgs) -> Result<String, CliError> {
    let cfg = load_config(&a.config)?;
    let n = a.n.or(cfg.n).ok_or_else(|| CliError::usage("missing --n"))?;
    let k = a.k.or(cfg.k).ok_or_else(|| CliError::usage("missing --k"))?;
    let v_tok = a.v.clone().or(cfg.v.clone()).unwrap_or_else(|| "sqrt(12)".into());
    let tau_tok = a.tau.clone().or(cfg.tau.clone()).unwrap_or_else(|| "pi/2".into());
    let v = parse_param_token(&v_tok).map_err(CliError::usage)?;
    let tau = parse_param_token(&tau_tok).map_err(CliError::usage)?;
    let boundary_str = a
        .boundary
        .clone()
        .or(cfg.boundary.clone())
        .unwrap_or_else(|| "open".into());
    let boundary = parse_boundary(&boundary_str)?;
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    let disorder = a.disorder.or(cfg.disorder);
    let out_path = a
        .out
        .clone()
        .or_else(|| cfg.out.clone().map(PathBuf::from));
    let ratios_path = a
        .ratios_out
        .clone()
        .or_else(|| cfg.ratios_out.clone().map(PathBuf::from));

    let resolved = json!({
        "cmd": "ed run", "n": n, "k": k, "v": v, "tau": tau,
        "boundary": boundary_str.to_ascii_lowercase(),
        "disorder": disorder, "seed": seed,
    });

    let basis = SectorBasis::new(n, k)?;
    let op = floquet_operator(&basis, v, tau, boundary, disorder.map(|w| (w, seed)))?;
    let spec = quasispectrum(&op, &basis, None)?;

    if let Some(path) = &out_path {
        let mut buf = Vec::new();
        buf.extend_from_slice(csv_provenance(&resolved, seed).as_bytes());
        write_eigenstate_csv(&mut buf, &spec)?;
        fs::write(path, buf)?;
    }

    let stats = spacing_ratios(&spec, true);
    if let Some(path) = &ratios_path {
        let mut buf = Vec::new();
        buf.extend_from_slice(csv_provenance(&resolved, seed).as_bytes());
        match &stats {
            Ok(s) => write_ratio_csv(&mut buf, s)?,
            Err(_) => buf.extend_from_slice(b"r\n"),
        }
        fs::write(path, buf)?;
    }

    let frozen_count = spec.frozen.iter().filter(|&&f| f).count();
    let max_entropy = spec.entropies.iter().cloned().fold(0.0, f64::max);
    let body = json!({
        "n": n, "k": k, "v": v, "tau": tau,
        "boundary": boundary_str.to_ascii_lowercase(),
        "dim": basis.dim(),
        "frozen_count": frozen_count,
        "max_entropy": max_entropy,
        "mean_spacing_ratio": stats.as_ref().ok().map(|s| s.mean),
        "out": out_path.as_ref().map(|p| p.display().to_string()),
        "ratios_out": ratios_path.as_ref().map(|p| p.display().to_string()),
    });
    Ok(emit_json(body, &resolved, seed))
}

fn cmd_report(a: &ReportArgs) -> Result<String, CliError> {
    let cfg = load_config(&a.config)?;
    let n = a.n.or(cfg.n).ok_or_else(|| CliError::usage("missing --n"))?;
    let k = a.k.or(cfg.k).ok_or_else(|| CliError::usage("missing --k"))?;
    let v_tok = a.v.clone().or(cfg.v.clone()).unwrap_or_else(|| "sqrt(12)".into());
    let tau_tok = a.tau.clone().or(cfg.tau.clone()).unwrap_or_else(|| "pi/2".into());
    let v = parse_param_token(&v_tok).map_err(CliError::usage)?;
    let tau = parse_param_token(&tau_tok).map_err(CliError::usage)?;
    let boundary_str = a
        .boundary
        .clone()
        .or(cfg.boundary.clone())
        .unwrap_or_else(|| "open".into());
    let boundary = parse_boundary(&boundary_str)?;
    let resolved = json!({
        "cmd": "report", "n": n, "k": k, "v": v, "tau": tau,
        "boundary": boundary_str.to_ascii_lowercase(),
    });
    let report = fragmentation_report(n, k, v, tau, boundary)?;
    let body = serde_json::to_value(&report).expect("serialization");
    let text = emit_json(body, &resolved, 0);
    if let Some(path) = &a.out {
        fs::write(path, format!("{text}\n"))?;
        Ok(format!("wrote report to {}", path.display()))
    } else {
        Ok(text)
    }
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

/// Parses `std::env::args`, runs the command, prints the payload, and
/// returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap renders its own help/usage; keep exit code 0 for
            // --help/--version and 1 for genuine usage errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.cmd {
        Cmd::Dioph(c) => cmd_dioph(c),
        Cmd::Ca(c) => cmd_ca(c),
        Cmd::Ed(EdCmd::Run(a)) => cmd_ed(a),
        Cmd::Report(a) => cmd_report(a),
    };
    match result {
        Ok(payload) => {
            // ignore broken pipes (e.g. piping into `head`)
            let _ = writeln!(std::io::stdout(), "{payload}");
            0
        }
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {}", e.message);
            e.code
        }
    }
}
