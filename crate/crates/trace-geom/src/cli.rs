//! Command-line configuration and dispatch.
//!
//! Every run resolves a [`RunConfig`] from the flags and an optional TOML
//! file, echoes it at the top of its output and then emits one result. JSON
//! output is `{"config": ..., "result": ...}`; CSV output starts with a
//! `# config: ...` comment line.

use crate::arch_spherical::{build_testfn, ArchPlace, Variant};
use crate::bt_tree::{count_fixed_bruteforce, orbital_integral_with_center, realize_gamma, Parity};
use crate::number_field::{enumerate_polycylinder, Polycylinder};
use crate::padic_local::{grid_csv, GammaLocal, HalfInt, LocalError, LocalGrid, SplittingType, SubgroupKind};
use crate::trace_geometry::{
    catalog_setting, choose_r, conductor_and_exponent, ledger_csv, lattice_volume, trace_region, BoundEngine,
    BoundOptions, GeomError, QuaternionSetting, SettingInput, SpectralWindow,
};
use crate::verify::{run_suite, Suite, SuiteReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "TRACE_GEOM_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("computation error: {0}")]
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Computation(_) => 3,
        }
    }
}

/// What a successful dispatch produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    /// False when `verify` found a violated invariant.
    pub verified: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.verified {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "trace-geom", version, about = "Geometric side of the trace formula: covolumes, orbital integrals, test functions and multiplicity bounds")]
pub struct Cli {
    /// TOML run configuration (format, seed, precision knobs).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format; overrides the configuration file.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Borel covolume and congruence index of a setting.
    Volume(VolumeArgs),
    /// Orbital integral of a local element on the Bruhat-Tits tree.
    LocalOrbital(LocalOrbitalArgs),
    /// Samples of an archimedean test function.
    ArchTestfn(ArchArgs),
    /// Integral traces in a polycylinder.
    CountTraces(CountArgs),
    /// The geometric side and the resulting multiplicity bound.
    DensityBound(DensityArgs),
    /// Run invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
#[group(required = true, multiple = false, id = "source")]
pub struct SettingSource {
    /// Setting file in TOML.
    #[arg(long, group = "source")]
    pub setting: Option<PathBuf>,
    /// Built-in setting, e.g. `Q-2-3`.
    #[arg(long, group = "source")]
    pub preset: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VolumeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SettingSource,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LocalOrbitalArgs {
    /// Residue field size (a prime).
    #[arg(long, required_unless_present = "grid")]
    pub q: Option<u64>,
    /// split, elliptic-unramified, tame-ramified or wild-ramified.
    #[arg(long = "type", required_unless_present = "grid")]
    pub kind: Option<String>,
    /// `v(Delta) / 2`, e.g. `1`, `3/2`.
    #[arg(long, required_unless_present = "grid")]
    pub nu: Option<String>,
    #[arg(long, required_unless_present = "grid")]
    pub r: Option<u32>,
    /// 0 for `K0(p^r)`, 1 for `K1(p^r)`.
    #[arg(long, required_unless_present = "grid")]
    pub j: Option<u8>,
    /// Parity of the fixed ball's centre (unramified elements).
    #[arg(long, default_value = "even")]
    pub center: String,
    /// Recount by the matrix action of an integral realization.
    #[arg(long)]
    pub bruteforce: bool,
    /// Tabulate local weight integrals over a grid of `(q, r, j)` instead
    /// (TOML, or JSON for a `.json` path).
    #[arg(long, conflicts_with_all = ["q", "kind", "nu", "r", "j", "bruteforce"])]
    pub grid: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VariantKind {
    Nontempered,
    Tempered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    /// `F_hat(i tau)` against `tau`.
    Transform,
    /// `H(e^x, F)` against `x`.
    Hc,
    /// `F` against the height `t`.
    Pointwise,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ArchArgs {
    /// real or complex.
    #[arg(long)]
    pub place: String,
    #[arg(long, value_enum)]
    pub variant: VariantKind,
    /// `R` for the non-tempered variant, `t` for the tempered one.
    #[arg(long, allow_negative_numbers = true)]
    pub param: f64,
    #[arg(long, value_enum)]
    pub emit: Emit,
    /// `lo:hi:n`, n evenly spaced samples including both ends.
    #[arg(long, default_value = "0:10:101", allow_hyphen_values = true)]
    pub grid: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SettingSource,
    /// Radii per archimedean place, comma separated (squared modulus at
    /// complex places).
    #[arg(long, value_delimiter = ',', conflicts_with = "window")]
    pub radii: Option<Vec<f64>>,
    /// Derive the trace region from a spectral window instead.
    #[arg(long)]
    pub window: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SettingSource,
    /// Spectral window in TOML.
    #[arg(long)]
    pub window: PathBuf,
    /// Absolute constant in the orbital-integral estimate (at least 4).
    #[arg(long = "Cabs")]
    pub c_abs: Option<f64>,
    /// Write the per-row ledger as CSV.
    #[arg(long)]
    pub ledger: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, required_unless_present = "all")]
    pub suite: Vec<Suite>,
    /// Every suite, in a fixed order.
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// The optional TOML run configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub format: Option<Format>,
    pub seed: Option<u64>,
    /// Truncation radius for brute-force tree counts; the default is
    /// `2 nu + r + 1`.
    pub padic_digits: Option<u32>,
    pub options: Option<BoundOptions>,
}

/// Fully resolved configuration, echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub seed: u64,
    pub padic_digits: Option<u32>,
    pub options: BoundOptions,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn resolve(cli: Cli, threads: Option<usize>) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(path) => {
                let text = read(path)?;
                toml::from_str::<ConfigFile>(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let mut options = file.options.unwrap_or_default();
        let mut seed = file.seed.unwrap_or(0);
        match &cli.command {
            Command::DensityBound(a) => {
                if let Some(c) = a.c_abs {
                    options.c_abs = c;
                }
            }
            Command::Verify(a) => {
                if let Some(s) = a.seed {
                    seed = s;
                }
            }
            _ => {}
        }
        Ok(Self {
            command: cli.command,
            format: cli.format.or(file.format).unwrap_or_default(),
            seed,
            padic_digits: file.padic_digits,
            options,
            threads,
        })
    }
}

/// Parse `TRACE_GEOM_THREADS`.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Computation(e.to_string())
}

fn load_setting(src: &SettingSource) -> Result<QuaternionSetting, CliError> {
    let input = match (&src.setting, &src.preset) {
        (Some(path), _) => {
            let text = read(path)?;
            SettingInput::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        (None, Some(name)) => {
            catalog_setting(name).ok_or_else(|| CliError::Config(format!("unknown preset {name:?}")))?
        }
        (None, None) => return Err(CliError::Config("a setting or preset is required".into())),
    };
    QuaternionSetting::new(input).map_err(|e| CliError::Config(e.to_string()))
}

fn load_window(path: &Path, setting: &QuaternionSetting) -> Result<SpectralWindow, CliError> {
    let text = read(path)?;
    let window =
        SpectralWindow::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    window.validate(setting).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(window)
}

/// A table emitted as CSV or as `{"columns", "rows"}`.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }
}

enum Payload {
    Json(Value),
    /// CSV body with the JSON equivalent for `--format json`.
    Table(Table),
    /// CSV-native output (ledgers, point lists) plus its JSON summary.
    Both { json: Value, csv: String },
}

/// Run a parsed command line; the caller maps the result to an exit code.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let threads = threads_from_env()?;
    let config = RunConfig::resolve(cli, threads)?;
    dispatch(&config)
}

pub fn dispatch(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut verified = true;
    let payload = match &config.command {
        Command::Volume(a) => volume(a, config)?,
        Command::LocalOrbital(a) => local_orbital(a, config)?,
        Command::ArchTestfn(a) => arch_testfn(a)?,
        Command::CountTraces(a) => count_traces(a, config)?,
        Command::DensityBound(a) => density_bound(a, config)?,
        Command::Verify(a) => {
            let (payload, ok) = verify(a, config)?;
            verified = ok;
            payload
        }
    };
    let output = render(config, payload)?;
    Ok(Outcome { output, verified })
}

fn render(config: &RunConfig, payload: Payload) -> Result<String, CliError> {
    let echo = serde_json::to_value(config).map_err(compute)?;
    Ok(match config.format {
        Format::Json => {
            let result = match payload {
                Payload::Json(v) | Payload::Both { json: v, .. } => v,
                Payload::Table(t) => t.json(),
            };
            let mut s = serde_json::to_string_pretty(&json!({ "config": echo, "result": result })).map_err(compute)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let body = match payload {
                Payload::Table(t) => t.csv(),
                Payload::Both { csv, .. } => csv,
                Payload::Json(_) => {
                    return Err(CliError::Config("this subcommand only produces JSON".into()));
                }
            };
            let mut s = String::new();
            writeln!(s, "# config: {echo}").expect("writing to a String");
            s.push_str(&body);
            s
        }
    })
}

fn volume(a: &VolumeArgs, config: &RunConfig) -> Result<Payload, CliError> {
    let setting = load_setting(&a.source)?;
    let v = lattice_volume(&setting, config.options.zeta_prime_bound).map_err(compute)?;
    Ok(Payload::Json(json!({
        "setting": setting.input,
        "zeta_prime_bound": config.options.zeta_prime_bound,
        "covolume": v.covolume,
        "congruence_index": v.congruence_index,
        "lattice_volume": v.lattice_volume,
    })))
}

fn local_grid(path: &Path) -> Result<Payload, CliError> {
    let text = read(path)?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str::<LocalGrid>(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str::<LocalGrid>(&text).map_err(|e| e.to_string())
    };
    let grid = parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let rows = grid.evaluate().map_err(|e| match e {
        LocalError::EnumerationBudgetExceeded { .. } => compute(e),
        e => CliError::Config(e.to_string()),
    })?;
    Ok(Payload::Both { json: json!({ "rows": rows }), csv: grid_csv(&rows) })
}

fn local_orbital(a: &LocalOrbitalArgs, config: &RunConfig) -> Result<Payload, CliError> {
    if let Some(path) = &a.grid {
        return local_grid(path);
    }
    let missing = |flag: &str| CliError::Config(format!("--{flag} is required"));
    let q = a.q.ok_or_else(|| missing("q"))?;
    let r = a.r.ok_or_else(|| missing("r"))?;
    let kind_name = a.kind.as_deref().ok_or_else(|| missing("type"))?;
    let nu_text = a.nu.as_deref().ok_or_else(|| missing("nu"))?;
    let j_num = a.j.ok_or_else(|| missing("j"))?;
    let kind = SplittingType::parse(kind_name).ok_or_else(|| CliError::Config(format!("unknown type {kind_name:?}")))?;
    let nu = HalfInt::parse(nu_text).ok_or_else(|| CliError::Config(format!("nu must be a half-integer, got {nu_text:?}")))?;
    let j = SubgroupKind::from_j(j_num).ok_or_else(|| CliError::Config(format!("j must be 0 or 1, got {j_num}")))?;
    let center = match a.center.as_str() {
        "even" => Parity::Even,
        "odd" => Parity::Odd,
        other => return Err(CliError::Config(format!("center must be even or odd, got {other:?}"))),
    };
    let gamma = GammaLocal::from_type(q, kind, nu).map_err(|e| CliError::Config(e.to_string()))?;
    let o = orbital_integral_with_center(q, &gamma, r, j, center).map_err(compute)?;
    let brute = if a.bruteforce {
        let real = realize_gamma(q, kind, nu).map_err(compute)?;
        // The companion matrix fixes a ball around an even vertex; the
        // conjugated pair covers the odd case.
        let m = match center {
            Parity::Even => real.matrices[0],
            Parity::Odd => *real.matrices.get(1).ok_or_else(|| {
                CliError::Computation("no odd-centred realization for this type".into())
            })?,
        };
        let t = config.padic_digits.unwrap_or(nu.twice() + r + 1);
        let b = count_fixed_bruteforce(q, &m, r, j, t).map_err(compute)?;
        Some(json!({
            "matrix": m.0,
            "trace": real.trace,
            "truncation_radius": b.truncation_radius,
            "count": b.count.count,
            "fixed_vertices": b.fixed_vertices,
            "descriptor": b.descriptor,
            "agrees": b.count.count == o.count.count,
        }))
    } else {
        None
    };
    Ok(Payload::Json(json!({
        "q": q,
        "type": kind,
        "nu": nu.to_string(),
        "r": r,
        "j": j_num,
        "center": center,
        "descriptor": o.descriptor,
        "count": o.count.count,
        "O_num": o.count.value.numer(),
        "O_den": o.count.value.denom(),
        "O_prime": o.verification.o_prime,
        "bound": o.verification.bound,
        "ratio": o.verification.ratio,
        "exact": o.count.exact,
        "weight": o.verification.weight,
        "volume": format!("{}/{}", o.verification.volume.numer(), o.verification.volume.denom()),
        "bruteforce": brute,
    })))
}

fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("grid must be lo:hi:n, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite()) || n == 0 || n > 1_000_000 {
        return Err(bad());
    }
    Ok(if n == 1 { vec![lo] } else { (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect() })
}

fn arch_testfn(a: &ArchArgs) -> Result<Payload, CliError> {
    let place = ArchPlace::parse(&a.place).ok_or_else(|| CliError::Config(format!("unknown place {:?}", a.place)))?;
    let variant = match a.variant {
        VariantKind::Nontempered => Variant::Nontempered { r: a.param },
        VariantKind::Tempered => Variant::Tempered { t: a.param },
    };
    let grid = parse_grid(&a.grid)?;
    let f = build_testfn(place, variant).map_err(|e| CliError::Config(e.to_string()))?;
    let table = match a.emit {
        Emit::Transform => Table {
            columns: vec!["tau", "F_hat"],
            rows: grid.iter().map(|&tau| vec![tau, f.transform(Complex64::new(0.0, tau)).re]).collect(),
        },
        Emit::Hc => Table {
            columns: vec!["log_y", "y", "H"],
            rows: grid.iter().map(|&x| vec![x, x.exp(), f.hc(x.exp())]).collect(),
        },
        Emit::Pointwise => {
            if grid.iter().any(|&t| t < 0.0) {
                return Err(CliError::Config("heights must be nonnegative".into()));
            }
            Table { columns: vec!["t", "F"], rows: grid.iter().map(|&t| vec![t, f.pointwise(t)]).collect() }
        }
    };
    Ok(Payload::Table(table))
}

fn count_traces(a: &CountArgs, config: &RunConfig) -> Result<Payload, CliError> {
    let setting = load_setting(&a.source)?;
    let region = match (&a.radii, &a.window) {
        (Some(radii), _) => Polycylinder::new(&setting.field, radii.clone()).map_err(|e| CliError::Config(e.to_string()))?,
        (None, Some(path)) => {
            let window = load_window(path, &setting)?;
            let v = lattice_volume(&setting, config.options.zeta_prime_bound).map_err(compute)?;
            let c = conductor_and_exponent(&setting, &window, v.lattice_volume).map_err(compute)?;
            let r = choose_r(&setting, &window, &c);
            trace_region(&setting, &window, &r).map_err(compute)?
        }
        (None, None) => return Err(CliError::Config("give --radii or --window".into())),
    };
    let en = enumerate_polycylinder(&setting.field, &region, None, u128::from(config.options.enumeration_budget))
        .map_err(|e| compute(GeomError::from(e)))?;
    let json = json!({
        "radii": region.radii,
        "count": en.count(),
        "ambiguous": en.ambiguous.len(),
        "box_points": en.box_points,
        "points": en.points,
        "ambiguous_points": en.ambiguous,
    });
    Ok(Payload::Both { json, csv: en.to_csv(&setting.field) })
}

fn density_bound(a: &DensityArgs, config: &RunConfig) -> Result<Payload, CliError> {
    let setting = load_setting(&a.source)?;
    let window = load_window(&a.window, &setting)?;
    if !(config.options.c_abs >= 4.0) {
        return Err(CliError::Config(format!("C_abs must be at least 4, got {}", config.options.c_abs)));
    }
    let mut engine = BoundEngine::new(setting, config.options.clone()).map_err(compute)?;
    let report = engine.bound(&window).map_err(compute)?;
    let csv = ledger_csv(&report.ledger, report.e_r());
    if let Some(path) = &a.ledger {
        std::fs::write(path, &csv).map_err(|e| CliError::Computation(format!("{}: {e}", path.display())))?;
    }
    let json = serde_json::to_value(&report).map_err(compute)?;
    Ok(Payload::Both { json, csv })
}

fn verify(a: &VerifyArgs, config: &RunConfig) -> Result<(Payload, bool), CliError> {
    let mut suites: Vec<Suite> = if a.all { Suite::ALL.to_vec() } else { a.suite.clone() };
    suites.sort();
    suites.dedup();
    let reports: Vec<SuiteReport> =
        suites.iter().map(|&s| run_suite(s, config.seed)).collect::<Result<_, _>>().map_err(compute)?;
    let passed = reports.iter().all(|r| r.passed);
    let summary: Vec<Value> = reports.iter().map(|r| json!({ "suite": r.suite, "passed": r.passed })).collect();
    Ok((Payload::Json(json!({ "passed": passed, "summary": summary, "suites": reports })), passed))
}
