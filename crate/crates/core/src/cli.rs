//! The `tetrakit` command line.
//!
//! Every subcommand emits one record. In json mode a record is a single line
//! of JSON with a top-level `schema_version`; integers are decimal strings.
//! Exit codes: 0 success, 1 usage error, 2 domain error, 3 budget exhausted.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::arith::{FactorConfig, FactoredInteger, Factorizer};
use crate::carmichael::LambdaChain;
use crate::dlp::{tetration_via_orders_traced, OrderMethod, OrderOracle};
use crate::error::Error;
use crate::level::{level_decompose, level_lower_bound, level_profile, level_via_orders};
use crate::omega::{base_success_report, to_f64, OmegaCalculator};
use crate::reduction::{classify_and_split, full_factorization_via_mtp, squarefree_part, SplitConfig};
use crate::tetration::{naive_tetration_mod, NaiveMode, TetrationQuery, Tetrator};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "TETRAKIT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            other => Err(format!("unknown output format '{other}' (expected json or text)")),
        }
    }
}

/// Budgets and knobs shared by all subcommands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub trial_division_bound: u64,
    pub rho_iteration_cap: u64,
    pub enumeration_cap: u64,
    pub base_bound_override: Option<u64>,
    pub thread_count: usize,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fc = FactorConfig::default();
        RunConfig {
            trial_division_bound: fc.trial_division_bound,
            rho_iteration_cap: fc.rho_iteration_cap,
            enumeration_cap: crate::omega::DEFAULT_ENUMERATION_CAP,
            base_bound_override: None,
            thread_count: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            output_format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    /// Parse a flat `key = value` file. Blank lines and `#` comments are ignored.
    pub fn parse_file(text: &str) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
            cfg.set(key.trim(), value.trim().trim_matches('"'))
                .map_err(|e| format!("line {}: {e}", no + 1))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn positive(key: &str, value: &str) -> Result<u64, String> {
            match value.parse::<u64>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(format!("{key} must be a positive integer, got '{value}'")),
            }
        }
        match key {
            "trial_division_bound" => self.trial_division_bound = positive(key, value)?,
            "rho_iteration_cap" => self.rho_iteration_cap = positive(key, value)?,
            "enumeration_cap" => self.enumeration_cap = positive(key, value)?,
            "base_bound_override" => {
                self.base_bound_override = match value {
                    "" | "none" => None,
                    v => Some(positive(key, v)?),
                }
            }
            "thread_count" => self.thread_count = positive(key, value)? as usize,
            "output_format" => self.output_format = value.parse()?,
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn factorizer(&self) -> Factorizer {
        Factorizer::new(FactorConfig {
            trial_division_bound: self.trial_division_bound,
            rho_iteration_cap: self.rho_iteration_cap,
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "tetrakit", version, about = "Modular tetration and tetration-based factoring reductions")]
struct Cli {
    /// Flat key = value file with RunConfig fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Worker threads (the TETRAKIT_THREADS variable takes precedence over the config file).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    trial_division_bound: Option<u64>,
    #[arg(long, global = true)]
    rho_iteration_cap: Option<u64>,
    #[arg(long, global = true)]
    enumeration_cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModulusArgs {
    #[arg(long, value_parser = parse_big)]
    modulus: BigUint,
    /// Known factorization of the modulus, e.g. 2^3,3,5^2.
    #[arg(long)]
    factors: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OmegaMode {
    Brute,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Bsgs,
    Brute,
    FactoredRefinement,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ᵏa mod N through the Carmichael chain.
    Tetrate {
        #[arg(long, value_parser = parse_big)]
        base: BigUint,
        #[arg(long)]
        height: u64,
        #[command(flatten)]
        m: ModulusArgs,
        /// Also evaluate the exact tower, when it fits in memory.
        #[arg(long)]
        naive: bool,
    },
    /// The level of a base modulo N, with the order-chain formula.
    Level {
        #[arg(long, value_parser = parse_big)]
        base: BigUint,
        #[command(flatten)]
        m: ModulusArgs,
    },
    /// Carmichael chain of N and iterated orders of a base.
    Orders {
        #[arg(long, value_parser = parse_big)]
        base: BigUint,
        #[command(flatten)]
        m: ModulusArgs,
    },
    /// Split N using tetration residues.
    Factor {
        #[arg(value_parser = parse_big)]
        n: BigUint,
        /// Largest base tried (default ⌈(log₂ N)²⌉).
        #[arg(long)]
        base_bound: Option<u64>,
        /// Search even when N is prime.
        #[arg(long)]
        oracle_only_top: bool,
        /// Recurse to the full factorization.
        #[arg(long)]
        full: bool,
    },
    /// Squarefree part of N via repeated splitting.
    Squarefree {
        #[arg(value_parser = parse_big)]
        n: BigUint,
        #[arg(long)]
        base_bound: Option<u64>,
        #[arg(long)]
        oracle_only_top: bool,
    },
    /// Failure density ω(u, v) of the split.
    Omega {
        #[arg(long, value_enum, default_value = "brute")]
        mode: OmegaMode,
        #[arg(value_parser = parse_big)]
        u: BigUint,
        #[arg(value_parser = parse_big)]
        v: BigUint,
    },
    /// Bases 2..=base-max for which the split of N fails.
    Report {
        #[command(flatten)]
        m: ModulusArgs,
        #[arg(long, default_value_t = 100)]
        base_max: u64,
    },
    /// ᵏa mod N from iterated orders given by a discrete-log solver.
    TetrateDlp {
        #[arg(long, value_parser = parse_big)]
        base: BigUint,
        #[arg(long)]
        height: u64,
        #[arg(long, value_parser = parse_big)]
        modulus: BigUint,
        #[arg(long, value_enum, default_value = "bsgs")]
        method: MethodArg,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Tetrate { .. } => "tetrate",
            Command::Level { .. } => "level",
            Command::Orders { .. } => "orders",
            Command::Factor { .. } => "factor",
            Command::Squarefree { .. } => "squarefree",
            Command::Omega { .. } => "omega",
            Command::Report { .. } => "report",
            Command::TetrateDlp { .. } => "tetrate-dlp",
        }
    }
}

fn parse_big(s: &str) -> Result<BigUint, String> {
    BigUint::from_str(s.trim()).map_err(|_| format!("'{s}' is not a non-negative decimal integer"))
}

/// Parse `p1^e1,p2^e2,...` (exponent 1 may be omitted).
pub fn parse_factors(s: &str) -> Result<FactoredInteger, Error> {
    let mut factors = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (p, e) = part.split_once('^').unwrap_or((part, "1"));
        let p = parse_big(p).map_err(Error::InvalidInput)?;
        let e: u32 = e
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad exponent in '{part}'")))?;
        *factors.entry(p).or_insert(0) += e;
    }
    FactoredInteger::from_factors(factors)
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

/// Run one command. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    let cfg = match resolve_config(&cli, std::env::var(THREADS_ENV).ok().as_deref()) {
        Ok(cfg) => cfg,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 1;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.thread_count).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return 1;
        }
    };
    let command = cli.command.name();
    match pool.install(|| execute(&cli.command, &cfg)) {
        Ok(body) => {
            let record = envelope(command, body);
            let written = match cfg.output_format {
                OutputFormat::Json => writeln!(out, "{}", Value::Object(record)),
                OutputFormat::Text => write!(out, "{}", render_text(&record)),
            };
            if written.is_err() {
                return 1;
            }
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_budget() || matches!(e, Error::Unresolved { .. }) {
        3
    } else {
        2
    }
}

fn resolve_config(cli: &Cli, env_threads: Option<&str>) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            RunConfig::parse_file(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    // an explicit --threads makes the variable irrelevant, even when malformed
    if let (Some(v), None) = (env_threads, cli.threads) {
        cfg.set("thread_count", v.trim()).map_err(|e| format!("{THREADS_ENV}: {e}"))?;
    }
    let flags = [
        ("thread_count", cli.threads.map(|v| v as u64)),
        ("trial_division_bound", cli.trial_division_bound),
        ("rho_iteration_cap", cli.rho_iteration_cap),
        ("enumeration_cap", cli.enumeration_cap),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v.to_string())?;
        }
    }
    if let Some(f) = cli.format {
        cfg.output_format = f;
    }
    Ok(cfg)
}

fn envelope(command: &str, body: Map<String, Value>) -> Map<String, Value> {
    let mut record = Map::new();
    record.insert("command".into(), json!(command));
    for (k, v) in body {
        record.insert(k, stringify_integers(v));
    }
    // the one JSON number in a record
    record.insert("schema_version".into(), json!(SCHEMA_VERSION));
    record
}

/// Integers become decimal strings at every depth.
fn stringify_integers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_u64() || n.is_i64() => Value::String(n.to_string()),
        Value::Array(items) => Value::Array(items.into_iter().map(stringify_integers).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, stringify_integers(v))).collect()),
        other => other,
    }
}

fn render_text(record: &Map<String, Value>) -> String {
    let mut s = String::new();
    for (k, v) in record {
        let shown = match v {
            Value::String(x) => x.clone(),
            Value::Null => "-".into(),
            other => other.to_string(),
        };
        s.push_str(&format!("{k}: {shown}\n"));
    }
    s
}

fn s(v: &BigUint) -> Value {
    Value::String(v.to_string())
}

fn ss<'a>(v: impl IntoIterator<Item = &'a BigUint>) -> Value {
    Value::Array(v.into_iter().map(s).collect())
}

fn to_map<T: Serialize>(v: &T) -> Map<String, Value> {
    match serde_json::to_value(v).expect("records serialize") {
        Value::Object(m) => m,
        other => Map::from_iter([("value".to_string(), other)]),
    }
}

/// Factorizer seeded with user-supplied primes, and the modulus' factorization.
fn with_factors(m: &ModulusArgs, cfg: &RunConfig) -> Result<(Factorizer, Option<FactoredInteger>), Failure> {
    let fz = cfg.factorizer();
    let Some(spec) = &m.factors else {
        return Ok((fz, None));
    };
    let f = parse_factors(spec).map_err(|e| Failure::Usage(format!("--factors: {e}")))?;
    if f.value() != &m.modulus {
        return Err(Failure::Usage(format!("--factors multiply to {}, not {}", f.value(), m.modulus)));
    }
    let fz = fz
        .with_known_primes(f.factors().keys().cloned())
        .map_err(|e| Failure::Usage(format!("--factors: {e}")))?;
    Ok((fz, Some(f)))
}

fn chain_for(m: &ModulusArgs, known: Option<FactoredInteger>, fz: &Factorizer) -> Result<LambdaChain, Error> {
    match known {
        Some(f) => LambdaChain::from_factored(f, fz),
        None => LambdaChain::new(&m.modulus, fz),
    }
}

fn chain_record(chain: &LambdaChain) -> Map<String, Value> {
    let mut r = Map::new();
    r.insert("lambda_chain".into(), ss(chain.values()));
    r.insert("chain_height".into(), json!(chain.height()));
    r.insert("big_l".into(), s(chain.big_l()));
    r.insert("e_max".into(), json!(chain.e_max()));
    r
}

fn split_config(base_bound: Option<u64>, oracle_only_top: bool, cfg: &RunConfig) -> SplitConfig {
    SplitConfig { base_bound: base_bound.or(cfg.base_bound_override), oracle_only_top }
}

fn nonzero(name: &str, v: &BigUint) -> Result<(), Failure> {
    if v == &BigUint::from(0u8) {
        return Err(Failure::Domain(Error::InvalidInput(format!("{name} must be at least 1"))));
    }
    Ok(())
}

fn execute(command: &Command, cfg: &RunConfig) -> Result<Map<String, Value>, Failure> {
    let mut r = Map::new();
    match command {
        Command::Tetrate { base, height, m, naive } => {
            let q = TetrationQuery::new(base.clone(), *height, m.modulus.clone())?;
            let (fz, known) = with_factors(m, cfg)?;
            let tet = Tetrator::from_chain(chain_for(m, known, &fz)?);
            let result = tet.tetrate(base, *height);
            r.insert("base".into(), s(base));
            r.insert("height".into(), json!(height));
            r.insert("modulus".into(), s(&m.modulus));
            r.insert("result".into(), s(&result));
            r.insert("stabilization_height".into(), json!(tet.stabilization_height()));
            if *naive {
                let value = match naive_tetration_mod(&q, NaiveMode::exact_tower()) {
                    Ok(v) => s(&v),
                    Err(e) if e.is_budget() => Value::Null,
                    Err(e) => return Err(e.into()),
                };
                r.insert("naive".into(), value);
            }
        }
        Command::Level { base, m } => {
            nonzero("modulus", &m.modulus)?;
            let (fz, _) = with_factors(m, cfg)?;
            let profile = level_profile(base, &m.modulus, &fz)?;
            let formula = match level_via_orders(base, &m.modulus, &fz) {
                Ok(v) => json!(v),
                Err(Error::NotCoprimeToL { .. }) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            r.insert("base".into(), s(base));
            r.insert("modulus".into(), s(&m.modulus));
            r.insert("level".into(), json!(profile.level));
            r.insert("level_via_orders".into(), formula);
            r.insert("lower_bound".into(), json!(level_lower_bound(base, &m.modulus, &fz)?));
            r.insert("order_chain".into(), ss(&profile.order_chain));
            r.insert("l_a".into(), s(&profile.l_a));
            r.insert("prime_power_levels".into(), Value::Object(to_map(&level_decompose(base, &m.modulus, &fz)?)));
        }
        Command::Orders { base, m } => {
            nonzero("modulus", &m.modulus)?;
            let (fz, known) = with_factors(m, cfg)?;
            let chain = chain_for(m, known, &fz)?;
            let profile = level_profile(base, &m.modulus, &fz)?;
            r.insert("base".into(), s(base));
            r.insert("modulus".into(), s(&m.modulus));
            r.extend(chain_record(&chain));
            r.insert("order_chain".into(), ss(&profile.order_chain));
            r.insert("l_a".into(), s(&profile.l_a));
        }
        Command::Factor { n, base_bound, oracle_only_top, full } => {
            nonzero("N", n)?;
            let fz = cfg.factorizer();
            let sc = split_config(*base_bound, *oracle_only_top, cfg);
            let search = classify_and_split(n, &sc, &fz)?;
            r.insert("n".into(), s(n));
            r.extend(to_map(&search));
            if *full {
                let f = full_factorization_via_mtp(n, &sc, &fz)?;
                r.insert("factorization".into(), Value::Object(to_map(&f)));
            }
        }
        Command::Squarefree { n, base_bound, oracle_only_top } => {
            nonzero("N", n)?;
            let fz = cfg.factorizer();
            let result = squarefree_part(n, &split_config(*base_bound, *oracle_only_top, cfg), &fz)?;
            r.insert("n".into(), s(n));
            r.extend(to_map(&result));
        }
        Command::Omega { mode, u, v } => {
            let calc = OmegaCalculator::new(cfg.factorizer(), cfg.enumeration_cap);
            match mode {
                OmegaMode::Brute => {
                    let report = calc.omega_report(u, v)?;
                    r.insert("mode".into(), json!("brute"));
                    r.insert("omega_approx".into(), json!(format!("{:.6}", to_f64(&report.omega))));
                    r.extend(to_map(&report));
                }
                OmegaMode::Bound => {
                    let (p, q) = if u < v { (u, v) } else { (v, u) };
                    let bound = calc.omega_bound(p, q)?;
                    let big_l_q = LambdaChain::new(q, &cfg.factorizer())?.big_l().clone();
                    r.insert("mode".into(), json!("bound"));
                    r.insert("p".into(), s(p));
                    r.insert("q".into(), s(q));
                    r.insert("bound".into(), json!(format!("{}/{}", bound.numer(), bound.denom())));
                    r.insert("bound_approx".into(), json!(format!("{:.6}", to_f64(&bound))));
                    r.insert("equality_expected".into(), json!(!(big_l_q % p == BigUint::from(0u8))));
                }
            }
        }
        Command::Report { m, base_max } => {
            nonzero("modulus", &m.modulus)?;
            let (fz, known) = with_factors(m, cfg)?;
            let f = match known {
                Some(f) => f,
                None => fz.factorize(&m.modulus)?,
            };
            let report = base_success_report(&f, *base_max, &fz)?;
            r.extend(to_map(&report));
            r.insert("failing_count".into(), json!(report.failing_bases.len()));
        }
        Command::TetrateDlp { base, height, modulus, method } => {
            let q = TetrationQuery::new(base.clone(), *height, modulus.clone())?;
            let method = match method {
                MethodArg::Bsgs => OrderMethod::Bsgs,
                MethodArg::Brute => OrderMethod::Brute,
                MethodArg::FactoredRefinement => OrderMethod::FactoredRefinement,
            };
            let oracle = OrderOracle::new(method).with_factorizer(cfg.factorizer());
            let run = tetration_via_orders_traced(&q, &oracle)?;
            r.insert("base".into(), s(base));
            r.insert("height".into(), json!(height));
            r.insert("modulus".into(), s(modulus));
            r.insert("result".into(), s(&run.residue));
            r.extend(to_map(&run));
        }
    }
    Ok(r)
}
