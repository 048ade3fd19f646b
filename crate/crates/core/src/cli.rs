//! Command-line front end: curve configuration, result envelopes, the
//! on-disk cache and the verification suites.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{factorial, BaseNumber as K, Field};
use crate::applications::{hurwitz_bruteforce, hurwitz_extract, norbury_scott_extract};
use crate::bessel::{check_contour_lemma, check_j_bessel, check_qde, CheckReport};
use crate::curve::{CurveKind, SpectralCurve};
use crate::error::{Error, Result};
use crate::forms::FormSystem;
use crate::givental::FrobeniusPoint;
use crate::graphsum::{descendant_sum, omega_via_graphs, sign_self_test, GraphWeights, Insertion};
use crate::intersections::tau;
use crate::recursion::Recursion;
use crate::rmatrix::{r_closed, r_from_curve, r_from_ode_at, RMatrix};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "P1TR_CACHE_DIR";
const CACHE_FORMAT: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "p1tr", version, about = "Exact topological recursion for the equivariant mirror curve of P^1")]
pub struct Cli {
    /// Curve config JSON: {"kind": "p1"|"lambert", "w1", "w2", "sigma", "order"}.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Cache directory; overrides $P1TR_CACHE_DIR.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Disable the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pretty,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Recursion,
    Graphsum,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Curve,
    Ode,
    Closed,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    TheoremMain,
    Rmatrix,
    NorburyScott,
    BouchardMarino,
    Bessel,
    Intersections,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::TheoremMain => "theorem-main",
            Suite::Rmatrix => "rmatrix",
            Suite::NorburyScott => "norbury-scott",
            Suite::BouchardMarino => "bouchard-marino",
            Suite::Bessel => "bessel",
            Suite::Intersections => "intersections",
            Suite::All => "all",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// omega_{g,n} in the dxi basis.
    Omega {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Method::Recursion)]
        method: Method,
    },
    /// Stationary invariants of P^1 read off omega at w1 = w2 = 0.
    Gw {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        amax: usize,
    },
    /// Simple Hurwitz number H_{g,mu}; mu is a comma-separated partition.
    Hurwitz {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        mu: String,
    },
    /// R-matrix coefficients R_k by route.
    Rmatrix {
        #[arg(long, value_enum, default_value_t = RouteArg::All)]
        route: RouteArg,
        #[arg(long)]
        order: Option<usize>,
    },
    /// psi-class intersection number <tau_k1 ... tau_kn>_g; k is comma-separated.
    Psi {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        k: String,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

/// Exit status for an error: 1 verification, 2 invalid input, 3 escalation exhausted.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verification(_) => 1,
        Error::EscalationExhausted(_) | Error::Truncation { .. } => 3,
        _ => 2,
    }
}

/// Parsed curve configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveConfig {
    pub curve: SpectralCurve<K>,
    pub order: Option<usize>,
}

impl CurveConfig {
    pub fn p1(w1: K, w2: K, sigma: K) -> Result<Self> {
        Ok(CurveConfig { curve: SpectralCurve::p1(w1, w2, sigma)?, order: None })
    }

    /// Default equivariant point (w1, w2, sigma) = (1, 0, sqrt2).
    pub fn default_p1() -> Self {
        Self::p1(K::one(), K::zero(), K::sqrt2()).expect("valid default point")
    }

    /// Non-equivariant point sigma = sqrt2, q = 1.
    pub fn default_stationary() -> Self {
        Self::p1(K::zero(), K::zero(), K::sqrt2()).expect("valid default point")
    }

    pub fn default_lambert() -> Self {
        CurveConfig { curve: SpectralCurve::lambert(), order: None }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let m = v.as_object().ok_or_else(|| Error::InvalidInput("config must be a JSON object".into()))?;
        for k in m.keys() {
            if !["kind", "w1", "w2", "sigma", "order"].contains(&k.as_str()) {
                return Err(Error::InvalidInput(format!("unknown config key '{k}'")));
            }
        }
        let num = |k: &str| m.get(k).map(K::from_json).transpose();
        let order = match m.get("order") {
            None => None,
            Some(Value::Number(n)) => Some(
                n.as_u64()
                    .ok_or_else(|| Error::InvalidInput(format!("order must be a nonnegative integer, got {n}")))?
                    as usize,
            ),
            Some(o) => return Err(Error::InvalidInput(format!("order must be an integer, got {o}"))),
        };
        let curve = match m.get("kind").and_then(Value::as_str) {
            Some("p1") => {
                let need = |k: &str| num(k)?.ok_or_else(|| Error::InvalidInput(format!("p1 config needs '{k}'")));
                SpectralCurve::p1(need("w1")?, need("w2")?, need("sigma")?)?
            }
            Some("lambert") => {
                if num("w2")?.is_some_and(|w| !w.is_zero()) {
                    return Err(Error::InvalidInput("lambert config has no w2".into()));
                }
                let w1 = num("w1")?.unwrap_or_else(|| K::from_i64(-1));
                let sigma = match num("sigma")? {
                    Some(s) => s,
                    None if w1 == K::from_i64(-1) => K::i(),
                    None => return Err(Error::InvalidInput("lambert config needs 'sigma' with sigma^2 = w1".into())),
                };
                SpectralCurve::log_line(w1, sigma)?
            }
            Some(other) => return Err(Error::InvalidInput(format!("unknown curve kind '{other}'"))),
            None => return Err(Error::InvalidInput("config needs 'kind'".into())),
        };
        Ok(CurveConfig { curve, order })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&s).map_err(|e| Error::InvalidInput(format!("config is not JSON: {e}")))?;
        Self::from_json(&v)
    }

    pub fn forms(&self) -> Arc<FormSystem<K>> {
        Arc::new(FormSystem::new(self.curve.clone()))
    }
}

/// Versioned, hashed output of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultEnvelope {
    pub command: String,
    pub params: Value,
    pub orders: Value,
    pub payload: Value,
}

impl ResultEnvelope {
    fn body(&self) -> Value {
        json!({
            "version": VERSION,
            "command": self.command,
            "params": self.params,
            "orders": self.orders,
            "payload": self.payload,
        })
    }

    /// sha256 of the canonical JSON of everything except the hash.
    pub fn hash(&self) -> String {
        let s = serde_json::to_string(&self.body()).expect("json");
        hex::encode(Sha256::digest(s.as_bytes()))
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.body();
        v.as_object_mut().expect("object").insert("hash".into(), Value::String(self.hash()));
        v
    }
}

/// JSON cache keyed by (curve hash, kind, indices, orders).
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).map_err(|e| Error::InvalidInput(format!("cache dir {}: {e}", dir.display())))?;
        Ok(Cache { dir })
    }

    /// Explicit directory, else $P1TR_CACHE_DIR, else none.
    pub fn from_env(explicit: Option<PathBuf>) -> Result<Option<Self>> {
        match explicit.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)) {
            Some(d) => Ok(Some(Self::new(d)?)),
            None => Ok(None),
        }
    }

    pub fn key(curve: &str, kind: &str, indices: &Value, orders: &Value) -> Value {
        json!({"curve": curve, "kind": kind, "indices": indices, "orders": orders})
    }

    pub fn path_for(&self, key: &Value) -> PathBuf {
        let s = serde_json::to_string(key).expect("json");
        self.dir.join(format!("{}.json", hex::encode(Sha256::digest(s.as_bytes()))))
    }

    fn lock(&self, exclusive: bool) -> Option<File> {
        let f = OpenOptions::new().create(true).truncate(false).write(true).open(self.dir.join(".lock")).ok()?;
        let ok = if exclusive { f.lock().is_ok() } else { f.lock_shared().is_ok() };
        ok.then_some(f)
    }

    /// Cached payload, or None. Unreadable or mismatched entries are deleted.
    pub fn get(&self, key: &Value) -> Option<Value> {
        let path = self.path_for(key);
        let _guard = self.lock(false);
        let text = fs::read_to_string(&path).ok()?;
        let entry: Option<Value> = serde_json::from_str(&text).ok();
        let valid = entry.as_ref().and_then(|e| {
            (e.get("format")? == &json!(CACHE_FORMAT) && e.get("key")? == key).then(|| e.get("payload").cloned())?
        });
        if valid.is_none() {
            drop(_guard);
            let _w = self.lock(true);
            let _ = fs::remove_file(&path);
        }
        valid
    }

    pub fn put(&self, key: &Value, payload: &Value) -> Result<()> {
        let path = self.path_for(key);
        let entry = json!({"format": CACHE_FORMAT, "key": key, "payload": payload});
        let _guard = self.lock(true);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let write = || -> std::io::Result<()> {
            let mut f = File::create(&tmp)?;
            f.write_all(serde_json::to_string(&entry).expect("json").as_bytes())?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        };
        write().map_err(|e| Error::InvalidInput(format!("cache write {}: {e}", path.display())))
    }
}

fn cached(cache: Option<&Cache>, key: Value, compute: impl FnOnce() -> Result<Value>) -> Result<Value> {
    if let Some(c) = cache {
        if let Some(v) = c.get(&key) {
            return Ok(v);
        }
    }
    let v = compute()?;
    if let Some(c) = cache {
        c.put(&key, &v)?;
    }
    Ok(v)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("{what} must be a comma-separated list of nonnegative integers, got '{s}'")))
        })
        .collect()
}

fn rat_str(r: &BigRational) -> String {
    r.to_string()
}

fn unstable_message(g: usize, n: usize) -> Error {
    if (g, n) == (0, 1) {
        Error::InvalidInput("ω_{0,1}=0: (g, n) = (0, 1) is unstable".into())
    } else {
        Error::Unstable { g, n }
    }
}

/// Computed envelope plus its human-readable rendering.
pub struct Output {
    pub envelope: ResultEnvelope,
    pub pretty: String,
    pub csv: Option<String>,
    /// Verification outcome; false maps to exit code 1.
    pub ok: bool,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.envelope.to_json()).expect("json"),
            Format::Csv => self.csv.clone().unwrap_or_else(|| serde_json::to_string(&self.envelope.to_json()).expect("json")),
            Format::Pretty => format!("{}\nhash: {}", self.pretty, self.envelope.hash()),
        }
    }
}

fn config_or(cfg: Option<&CurveConfig>, default: impl FnOnce() -> CurveConfig) -> CurveConfig {
    cfg.cloned().unwrap_or_else(default)
}

/// Runs one subcommand.
pub fn execute(cmd: &Command, cfg: Option<&CurveConfig>, cache: Option<&Cache>) -> Result<Output> {
    match cmd {
        Command::Omega { g, n, method } => cmd_omega(&config_or(cfg, CurveConfig::default_p1), *g, *n, *method, cache),
        Command::Gw { g, n, amax } => cmd_gw(&config_or(cfg, CurveConfig::default_stationary), *g, *n, *amax, cache),
        Command::Hurwitz { g, mu } => cmd_hurwitz(&config_or(cfg, CurveConfig::default_lambert), *g, &parse_list(mu, "mu")?, cache),
        Command::Rmatrix { route, order } => cmd_rmatrix(&config_or(cfg, CurveConfig::default_p1), *route, *order),
        Command::Psi { g, k } => cmd_psi(*g, &parse_list(k, "k")?),
        Command::Verify { suite } => cmd_verify(cfg, *suite),
    }
}

pub fn cmd_omega(cfg: &CurveConfig, g: usize, n: usize, method: Method, cache: Option<&Cache>) -> Result<Output> {
    if n == 0 || 2 * g + n <= 2 {
        return Err(unstable_message(g, n));
    }
    let fs = cfg.forms();
    let r_order = GraphWeights::<K>::order_for(g, n);
    let orders = match method {
        Method::Recursion => json!({"recursion": "auto"}),
        _ => json!({"recursion": "auto", "r": r_order}),
    };
    let method_name = match method {
        Method::Recursion => "recursion",
        Method::Graphsum => "graphsum",
        Method::Both => "both",
    };
    let key = Cache::key(&cfg.curve.fingerprint(), &format!("omega-{method_name}"), &json!([g, n]), &orders);
    let payload = cached(cache, key, || {
        sign_self_test(&fs)?;
        let rec = || Recursion::new(fs.clone()).omega(g, n);
        let gs = || -> Result<_> { omega_via_graphs(&fs, &r_from_curve(&fs, r_order)?, g, n) };
        Ok(match method {
            Method::Recursion => json!({"method": method_name, "tensor": rec()?.to_json()}),
            Method::Graphsum => json!({"method": method_name, "tensor": gs()?.to_json()}),
            Method::Both => {
                let a = rec()?;
                let b = gs()?;
                json!({"method": method_name, "tensor": a.to_json(), "equal": *a == b})
            }
        })
    })?;
    let terms = payload["tensor"]["terms"].as_array().map_or(0, Vec::len);
    let mut pretty = format!("omega_{{{g},{n}}} via {method_name}: {terms} terms");
    let mut ok = true;
    if let Some(eq) = payload.get("equal").and_then(Value::as_bool) {
        pretty.push_str(&format!("\nequal: {eq}"));
        ok = eq;
    }
    let envelope = ResultEnvelope {
        command: "omega".into(),
        params: json!({"curve": cfg.curve.params_json(), "g": g, "n": n, "method": method_name}),
        orders,
        payload,
    };
    Ok(Output { envelope, pretty, csv: None, ok })
}

pub fn cmd_gw(cfg: &CurveConfig, g: usize, n: usize, amax: usize, cache: Option<&Cache>) -> Result<Output> {
    if n == 0 || 2 * g + n <= 2 {
        return Err(unstable_message(g, n));
    }
    if !cfg.curve.is_non_equivariant() {
        return Err(Error::InvalidInput("gw needs a p1 config with w1 = w2 = 0".into()));
    }
    let orders = json!({"amax": amax});
    let key = Cache::key(&cfg.curve.fingerprint(), "gw", &json!([g, n]), &orders);
    let payload = cached(cache, key, || {
        let fs = cfg.forms();
        let omega = Recursion::new(fs.clone()).omega(g, n)?;
        let table = norbury_scott_extract(&fs, &omega, amax)?;
        let entries: Vec<Value> = table
            .iter()
            .map(|(a, e)| json!({"a": a, "bracket": e.full.to_json(), "q_power": e.q_power, "value": e.value.to_json()}))
            .collect();
        Ok(json!({"g": g, "n": n, "entries": entries}))
    })?;
    let entries = payload["entries"].as_array().cloned().unwrap_or_default();
    let mut pretty = Vec::new();
    let mut csv = vec!["a,q_power,value".to_string()];
    for e in &entries {
        let value = K::from_json(&e["value"])?;
        if value.is_zero() {
            continue;
        }
        let a: Vec<usize> = serde_json::from_value(e["a"].clone()).unwrap_or_default();
        let ins: Vec<String> = a.iter().map(|x| format!("tau_{x}(H)")).collect();
        pretty.push(format!("<{}>_{{{g},{n}}} = {value}  (q^{})", ins.join(" "), e["q_power"]));
        let a_s: Vec<String> = a.iter().map(usize::to_string).collect();
        csv.push(format!("{},{},{value}", a_s.join(" "), e["q_power"]));
    }
    let envelope = ResultEnvelope {
        command: "gw".into(),
        params: json!({"curve": cfg.curve.params_json(), "g": g, "n": n}),
        orders,
        payload,
    };
    Ok(Output { envelope, pretty: pretty.join("\n"), csv: Some(csv.join("\n")), ok: true })
}

pub fn cmd_hurwitz(cfg: &CurveConfig, g: usize, mu: &[usize], cache: Option<&Cache>) -> Result<Output> {
    if cfg.curve.kind != CurveKind::LogLine {
        return Err(Error::InvalidInput("hurwitz needs a lambert config".into()));
    }
    let mut mu = mu.to_vec();
    mu.sort();
    let n = mu.len();
    let mumax = *mu.iter().max().unwrap_or(&0);
    let orders = json!({"mumax": mumax});
    let key = Cache::key(&cfg.curve.fingerprint(), "hurwitz", &json!({"g": g, "mu": mu}), &orders);
    let payload = cached(cache, key, || {
        let bf = hurwitz_bruteforce(g, &mu)?;
        let mut p = Map::new();
        p.insert("g".into(), json!(g));
        p.insert("mu".into(), json!(mu));
        p.insert("bruteforce".into(), json!(rat_str(&bf)));
        if n > 0 && 2 * g + n > 2 {
            let fs = cfg.forms();
            let omega = Recursion::new(fs.clone()).omega(g, n)?;
            let table = hurwitz_extract(&fs, &omega, mumax)?;
            let ext = table.get(&mu).cloned().unwrap_or_else(K::zero);
            p.insert("extracted".into(), ext.to_json());
            p.insert("equal".into(), json!(ext == K::from_rational(&bf)));
        }
        Ok(Value::Object(p))
    })?;
    let mu_s: Vec<String> = mu.iter().map(usize::to_string).collect();
    let mut pretty = format!("H_{{{g},({})}} = {}", mu_s.join(","), payload["bruteforce"].as_str().unwrap_or(""));
    let mut ok = true;
    if let Some(eq) = payload.get("equal").and_then(Value::as_bool) {
        pretty.push_str(&format!("\nextracted from omega_{{{g},{n}}}: equal: {eq}"));
        ok = eq;
    }
    let envelope = ResultEnvelope {
        command: "hurwitz".into(),
        params: json!({"curve": cfg.curve.params_json(), "g": g, "mu": mu}),
        orders,
        payload,
    };
    Ok(Output { envelope, pretty, csv: None, ok })
}

pub fn cmd_rmatrix(cfg: &CurveConfig, route: RouteArg, order: Option<usize>) -> Result<Output> {
    let order = order.or(cfg.order).unwrap_or(6) + 1;
    let c = &cfg.curve;
    let p1 = c.kind == CurveKind::P1;
    let mut routes: Vec<RMatrix<K>> = Vec::new();
    let want = |r: RouteArg| route == r || route == RouteArg::All;
    if want(RouteArg::Curve) {
        routes.push(r_from_curve(&cfg.forms(), order)?);
    }
    if want(RouteArg::Ode) {
        if p1 {
            routes.push(r_from_ode_at(&c.params.w1, &c.params.w2, &c.params.sigma, order)?);
        } else if route == RouteArg::Ode {
            return Err(Error::InvalidInput("the ODE route needs a p1 config".into()));
        }
    }
    if want(RouteArg::Closed) {
        if c.is_non_equivariant() {
            routes.push(r_closed(&c.params.sigma, order)?);
        } else if route == RouteArg::Closed {
            return Err(Error::InvalidInput("the closed form needs w1 = w2 = 0".into()));
        }
    }
    let agree = routes.windows(2).all(|w| w[0].agrees_with(&w[1], order as i64));
    let unitary = routes.iter().all(RMatrix::is_unitary);
    let payload = json!({
        "routes": routes.iter().map(RMatrix::to_json).collect::<Vec<_>>(),
        "agree": agree,
        "unitary": unitary,
    });
    let pretty = serde_json::to_string_pretty(&payload).expect("json");
    let envelope = ResultEnvelope {
        command: "rmatrix".into(),
        params: json!({"curve": c.params_json(), "route": format!("{route:?}").to_lowercase()}),
        orders: json!({"z": order - 1}),
        payload,
    };
    Ok(Output { envelope, pretty, csv: None, ok: agree && unitary })
}

pub fn cmd_psi(g: usize, k: &[usize]) -> Result<Output> {
    let v = tau(g, k)?;
    let ins: Vec<String> = k.iter().map(|x| format!("tau_{x}")).collect();
    let pretty = format!("<{}>_{g} = {}", ins.join(" "), rat_str(&v));
    let envelope = ResultEnvelope {
        command: "psi".into(),
        params: json!({"g": g, "k": k}),
        orders: json!({}),
        payload: json!({"value": rat_str(&v)}),
    };
    Ok(Output { envelope, pretty, csv: None, ok: true })
}

pub fn cmd_verify(cfg: Option<&CurveConfig>, suite: Suite) -> Result<Output> {
    let suites = match suite {
        Suite::All => vec![
            Suite::TheoremMain,
            Suite::Rmatrix,
            Suite::NorburyScott,
            Suite::BouchardMarino,
            Suite::Bessel,
            Suite::Intersections,
        ],
        s => vec![s],
    };
    let mut reports = Vec::new();
    for s in suites {
        reports.push(run_suite(s, cfg)?);
    }
    let ok = reports.iter().all(CheckReport::passed);
    let payload = json!({
        "suites": reports.iter().map(|r| json!({
            "name": r.name, "passed": r.passed(), "checks": r.checked, "failures": r.failures,
        })).collect::<Vec<_>>(),
        "passed": ok,
    });
    let pretty = reports.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n");
    let params = match cfg {
        Some(c) => json!({"curve": c.curve.params_json(), "suite": suite.name()}),
        None => json!({"suite": suite.name()}),
    };
    let envelope = ResultEnvelope { command: "verify".into(), params, orders: json!({}), payload };
    Ok(Output { envelope, pretty, csv: None, ok })
}

/// P1 point for the suites: the configured one if it is a p1 curve, else the default.
fn suite_point(cfg: Option<&CurveConfig>) -> CurveConfig {
    cfg.filter(|c| c.curve.kind == CurveKind::P1).cloned().unwrap_or_else(CurveConfig::default_p1)
}

pub fn run_suite(suite: Suite, cfg: Option<&CurveConfig>) -> Result<CheckReport> {
    let mut rep = CheckReport::new(suite.name());
    match suite {
        Suite::TheoremMain => {
            let c = suite_point(cfg);
            let fs = c.forms();
            let rec = Recursion::new(fs.clone());
            let r = r_from_curve(&fs, GraphWeights::<K>::order_for(2, 1))?;
            for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1)] {
                let ok = *rec.omega(g, n)? == omega_via_graphs(&fs, &r, g, n)?;
                rep.record(ok, || format!("omega_{{{g},{n}}}: recursion differs from graph sum"));
            }
        }
        Suite::Rmatrix => {
            let c = suite_point(cfg);
            let p = &c.curve.params;
            let order = 7;
            let a = r_from_curve(&c.forms(), order)?;
            let b = r_from_ode_at(&p.w1, &p.w2, &p.sigma, order)?;
            rep.record(a.agrees_with(&b, order as i64), || "curve and ODE routes differ".into());
            rep.record(a.is_unitary(), || "curve route not unitary".into());
            rep.record(b.is_unitary(), || "ODE route not unitary".into());
            let s = &p.sigma;
            let ne = CurveConfig::p1(K::zero(), K::zero(), s.clone())?;
            let cl = r_closed(s, order)?;
            let cu = r_from_curve(&ne.forms(), order)?;
            rep.record(cl.agrees_with(&cu, order as i64), || "closed form differs from curve route".into());
            rep.record(cl.is_unitary(), || "closed form not unitary".into());
        }
        Suite::NorburyScott => {
            let c = CurveConfig::default_stationary();
            let fs = c.forms();
            let rec = Recursion::new(fs.clone());
            let r = r_from_curve(&fs, 16)?;
            let p = FrobeniusPoint::new(K::zero(), K::zero(), c.curve.params.sigma.clone())?;
            for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2)] {
                for (a, e) in norbury_scott_extract(&fs, &*rec.omega(g, n)?, 4)? {
                    let inputs: Vec<_> = a.iter().map(|&x| vec![Insertion { flat: 1, a: x, coeff: K::one() }]).collect();
                    let d = descendant_sum(&p, &r, g, &inputs)?;
                    rep.record(d == e.full, || format!("({g},{n}) {a:?}: extracted {} vs graph sum {d}", e.full));
                }
            }
            for d in 1..=3u64 {
                let v = p.one_point(d as usize)?;
                let expected = K::from_rational(&BigRational::new(1.into(), factorial(d) * factorial(d)));
                rep.record(v == expected, || format!("one-point d={d}: {v}"));
            }
        }
        Suite::BouchardMarino => {
            let c = CurveConfig::default_lambert();
            let fs = c.forms();
            let rec = Recursion::new(fs.clone());
            for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2)] {
                for (mu, h) in hurwitz_extract(&fs, &*rec.omega(g, n)?, 4)? {
                    if mu.iter().sum::<usize>() > 4 {
                        continue;
                    }
                    let bf = K::from_rational(&hurwitz_bruteforce(g, &mu)?);
                    rep.record(h == bf, || format!("H_{{{g},{mu:?}}}: extracted {h} vs count {bf}"));
                }
            }
        }
        Suite::Bessel => {
            let c = suite_point(cfg);
            let p = &c.curve.params;
            let f = FrobeniusPoint::new(p.w1.clone(), p.w2.clone(), p.sigma.clone())?;
            rep.merge(check_j_bessel(&f, 8)?);
            rep.merge(check_qde(&f, 8)?);
            rep.merge(check_contour_lemma(3)?);
        }
        Suite::Intersections => {
            for n in 3..=8usize {
                for ks in compositions(n - 3, n) {
                    let mut expected = BigRational::from_integer(factorial(n as u64 - 3));
                    for &k in &ks {
                        expected /= BigRational::from_integer(factorial(k as u64));
                    }
                    let v = tau(0, &ks)?;
                    rep.record(v == expected, || format!("genus 0 {ks:?}: {v}"));
                }
            }
            // string and dilaton on every stable key with g <= 3 and n <= 3
            for g in 0..=3usize {
                for n in 1..=3usize {
                    if 2 * g + n <= 2 {
                        continue;
                    }
                    for ks in compositions(3 * g + n - 3, n) {
                        let mut with0 = ks.clone();
                        with0.push(0);
                        let mut string = BigRational::from_integer(0.into());
                        for j in 0..n {
                            if ks[j] > 0 {
                                let mut m = ks.clone();
                                m[j] -= 1;
                                string += tau(g, &m)?;
                            }
                        }
                        rep.record(tau(g, &with0)? == string, || format!("string at g={g} {ks:?}"));
                        let mut with1 = ks.clone();
                        with1.push(1);
                        let dil = tau(g, &ks)? * BigRational::from_integer(((2 * g + n) as i64 - 2).into());
                        rep.record(tau(g, &with1)? == dil, || format!("dilaton at g={g} {ks:?}"));
                    }
                }
            }
            let t = tau(1, &[1])?;
            rep.record(t == BigRational::new(1.into(), 24.into()), || format!("<tau_1>_1 = {t}"));
        }
        Suite::All => return Err(Error::InvalidInput("run the suites individually".into())),
    }
    Ok(rep)
}

/// Compositions of `total` into `parts` nonnegative parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok((text, ok)) => {
            println!("{text}");
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command line; returns the rendered output and the verification status.
pub fn run(cli: &Cli) -> Result<(String, bool)> {
    let cfg = cli.config.as_deref().map(CurveConfig::load).transpose()?;
    let cache = if cli.no_cache { None } else { Cache::from_env(cli.cache_dir.clone())? };
    let out = execute(&cli.command, cfg.as_ref(), cache.as_ref())?;
    Ok((out.render(cli.format), out.ok))
}
