//! Global assembly: covolumes, conductors, the trace region, per-trace
//! bounds and the final multiplicity bound.

mod centralizer;
mod lvalue;
mod rows;

pub use centralizer::{centralizer_bound, centralizer_volume_upper, disc_data, CentralizerBound, DiscData, FieldContext};
pub use lvalue::{exp_integral_e1, fundamental_discriminant, l_one_elementary, l_one_rational, l_one_smoothed, LMethod, LValue};
pub use rows::{ledger_csv, LedgerRow, LevelResidue, NormalizationFactors, RowContext, RowFlags};

use crate::arch_spherical::{build_testfn, ArchError, ArchPlace, TestFn, Variant};
use crate::number_field::{
    catalog_field, dedekind_zeta2, enumerate_polycylinder, split_prime, FieldElement, FieldError, FieldInput,
    NumberFieldSpec, Polycylinder, PrimeIdealData,
};
use crate::padic_local::{local_integral_bound, subgroup_index, two_torsion, weight_local_integral, LocalError, SubgroupKind};
use crate::Interval;
use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Arch(#[from] ArchError),
    #[error("invalid setting: {0}")]
    InvalidSetting(String),
    #[error("window does not match the setting: {0}")]
    WindowMismatch(String),
    #[error("x^2 - 4 is zero or a square in k; the trace is not regular")]
    CentralTrace,
    #[error("spectral lower bound over the window is not positive ({0:e})")]
    DegenerateWindow(f64),
}

/// Numerical knobs for the assembly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundOptions {
    /// Constant of the orbital-integral lemma; never below 4.
    pub c_abs: f64,
    pub zeta_prime_bound: u64,
    /// Largest conductor for the smoothed `L(1, chi)` sum over `Q`.
    pub l_exact_conductor: u64,
    /// Euler-product cutoff for `L(1, chi)` over other fields.
    pub euler_prime_bound: u64,
    /// Trial-division limit when `N(x^2 - 4)` has a cofactor above 64 bits.
    pub factor_budget: u64,
    /// Residue classes tried in the dyadic conductor search.
    pub dyadic_budget: u64,
    pub enumeration_budget: u64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            c_abs: 4.0,
            zeta_prime_bound: 100_000,
            l_exact_conductor: 1_000_000,
            euler_prime_bound: 2_000,
            factor_budget: 1_000_000,
            dyadic_budget: 1 << 16,
            enumeration_budget: 50_000_000,
        }
    }
}

/// A field by catalog name or inline description.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FieldRef {
    Catalog(String),
    Inline(FieldInput),
}

// Untagged derive buffers the input, which loses the i128 coefficients
// for some formats; dispatch on the shape instead.
impl<'de> Deserialize<'de> for FieldRef {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> serde::de::Visitor<'de> for V {
            type Value = FieldRef;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a catalog field name or an inline field table")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<FieldRef, E> {
                Ok(FieldRef::Catalog(v.to_owned()))
            }
            fn visit_map<A: serde::de::MapAccess<'de>>(self, map: A) -> Result<FieldRef, A::Error> {
                FieldInput::deserialize(serde::de::value::MapAccessDeserializer::new(map)).map(FieldRef::Inline)
            }
        }
        de.deserialize_any(V)
    }
}

impl FieldRef {
    pub fn build(&self) -> Result<NumberFieldSpec, GeomError> {
        match self {
            Self::Catalog(name) => {
                catalog_field(name).ok_or_else(|| GeomError::InvalidSetting(format!("unknown catalog field {name:?}")))
            }
            Self::Inline(input) => Ok(input.build()?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexedPrime {
    pub p: u64,
    /// Position in the sorted factorization of `p O`.
    #[serde(default)]
    pub index: usize,
}

/// A prime ideal: a rational prime (first prime above it) or `{p, index}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrimeRef {
    Rational(u64),
    Indexed(IndexedPrime),
}

impl PrimeRef {
    fn key(&self) -> (u64, usize) {
        match self {
            Self::Rational(p) => (*p, 0),
            Self::Indexed(ip) => (ip.p, ip.index),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelEntry {
    pub p: u64,
    #[serde(default)]
    pub index: usize,
    pub r: u32,
    #[serde(default)]
    pub kappa: u8,
}

/// A quaternion setting as written in a TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingInput {
    pub field: FieldRef,
    /// `(a, b, c)`: split real, complex and ramified real places.
    pub signature: [usize; 3],
    #[serde(default)]
    pub ram_f: Vec<PrimeRef>,
    #[serde(default)]
    pub level: Vec<LevelEntry>,
    /// Indices of the ramified real places; defaults to the last `c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramified_real: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

#[derive(Debug, Clone)]
pub struct LevelData {
    pub prime: PrimeIdealData,
    pub r: u32,
    pub kind: SubgroupKind,
}

/// A split archimedean place of the algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlace {
    /// Index among the field's places (real first).
    pub field_place: usize,
    pub kind: ArchPlace,
}

/// A validated setting.
#[derive(Debug, Clone)]
pub struct QuaternionSetting {
    pub input: SettingInput,
    pub field: NumberFieldSpec,
    pub signature: Signature,
    pub ram_f: Vec<PrimeIdealData>,
    pub level: Vec<LevelData>,
    pub split_places: Vec<SplitPlace>,
    pub ramified_real: Vec<usize>,
}

fn resolve_prime(field: &NumberFieldSpec, p: u64, index: usize) -> Result<PrimeIdealData, GeomError> {
    if !crate::arith::is_prime(p) {
        return Err(GeomError::InvalidSetting(format!("{p} is not prime")));
    }
    let primes = split_prime(field, p)?;
    let count = primes.len();
    primes
        .into_iter()
        .nth(index)
        .ok_or_else(|| GeomError::InvalidSetting(format!("only {count} primes above {p}, index {index} requested")))
}

impl SettingInput {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

impl QuaternionSetting {
    pub fn new(input: SettingInput) -> Result<Self, GeomError> {
        let field = input.field.build()?;
        let [a, b, c] = input.signature;
        let invalid = |m: String| Err(GeomError::InvalidSetting(m));
        if a + c != field.real_places || b != field.complex_places {
            return invalid(format!(
                "signature ({a},{b},{c}) does not match {} real and {} complex places",
                field.real_places, field.complex_places
            ));
        }
        if a + b == 0 {
            return invalid("at least one archimedean place must split".into());
        }
        let mut ram_keys: Vec<(u64, usize)> = input.ram_f.iter().map(PrimeRef::key).collect();
        ram_keys.sort_unstable();
        if ram_keys.windows(2).any(|w| w[0] == w[1]) {
            return invalid("ram_f lists a prime twice".into());
        }
        if (ram_keys.len() + c) % 2 == 1 {
            return invalid(format!("{} finite plus {c} real ramified places is odd", ram_keys.len()));
        }
        if ram_keys.is_empty() && c == 0 {
            return invalid("the algebra would be split; a division algebra needs a ramified place".into());
        }
        let ram_f = ram_keys.iter().map(|&(p, i)| resolve_prime(&field, p, i)).collect::<Result<Vec<_>, _>>()?;

        let mut level = Vec::new();
        let mut level_keys = Vec::new();
        for entry in &input.level {
            let key = (entry.p, entry.index);
            if ram_keys.contains(&key) {
                return invalid(format!("level prime ({}, {}) is ramified in the algebra", entry.p, entry.index));
            }
            if level_keys.contains(&key) {
                return invalid(format!("level prime ({}, {}) listed twice", entry.p, entry.index));
            }
            level_keys.push(key);
            if entry.r == 0 {
                return invalid("level exponents must be positive".into());
            }
            let kind = SubgroupKind::from_j(entry.kappa)
                .ok_or_else(|| GeomError::InvalidSetting(format!("kappa must be 0 or 1, got {}", entry.kappa)))?;
            let prime = resolve_prime(&field, entry.p, entry.index)?;
            if prime.f != 1 || prime.e != 1 {
                return invalid(format!("level prime above {} must have degree one and be unramified", entry.p));
            }
            level.push(LevelData { prime, r: entry.r, kind });
        }

        let r1 = field.real_places;
        let ramified_real = match &input.ramified_real {
            Some(list) => {
                let mut l = list.clone();
                l.sort_unstable();
                l.dedup();
                if l.len() != c || l.iter().any(|&v| v >= r1) {
                    return invalid(format!("ramified_real must list {c} distinct real places below {r1}"));
                }
                l
            }
            None => (r1 - c..r1).collect(),
        };
        let mut split_places: Vec<SplitPlace> = (0..r1)
            .filter(|v| !ramified_real.contains(v))
            .map(|v| SplitPlace { field_place: v, kind: ArchPlace::Real })
            .collect();
        split_places.extend((r1..field.places()).map(|v| SplitPlace { field_place: v, kind: ArchPlace::Complex }));

        Ok(Self { input, field, signature: Signature { a, b, c }, ram_f, level, split_places, ramified_real })
    }

    pub fn from_toml(text: &str) -> Result<Self, GeomError> {
        let input = SettingInput::from_toml(text).map_err(|e| GeomError::InvalidSetting(e.to_string()))?;
        Self::new(input)
    }

    /// `|ram_f|`.
    pub fn ram_count(&self) -> usize {
        self.ram_f.len()
    }
}

/// Settings used by the tests, the acceptance suite and the CLI.
pub fn catalog_settings() -> Vec<(&'static str, SettingInput)> {
    let rational = |ps: &[u64]| SettingInput {
        field: FieldRef::Catalog("Q".into()),
        signature: [1, 0, 0],
        ram_f: ps.iter().map(|&p| PrimeRef::Rational(p)).collect(),
        level: Vec::new(),
        ramified_real: None,
    };
    let two_above = |p: u64| vec![PrimeRef::Indexed(IndexedPrime { p, index: 0 }), PrimeRef::Indexed(IndexedPrime { p, index: 1 })];
    vec![
        ("Q-2-3", rational(&[2, 3])),
        ("Q-2-5", rational(&[2, 5])),
        ("Q-2-7", rational(&[2, 7])),
        (
            "Qi-13",
            SettingInput {
                field: FieldRef::Catalog("Q(i)".into()),
                signature: [0, 1, 0],
                ram_f: two_above(13),
                level: Vec::new(),
                ramified_real: None,
            },
        ),
        (
            "Qsqrt5-2",
            SettingInput {
                field: FieldRef::Catalog("Q(sqrt5)".into()),
                signature: [1, 0, 1],
                ram_f: vec![PrimeRef::Rational(2)],
                level: Vec::new(),
                ramified_real: None,
            },
        ),
        (
            "Qzeta5-11",
            SettingInput {
                field: FieldRef::Catalog("Q(zeta5)".into()),
                signature: [0, 2, 0],
                ram_f: two_above(11),
                level: Vec::new(),
                ramified_real: None,
            },
        ),
    ]
}

pub fn catalog_setting(name: &str) -> Option<SettingInput> {
    catalog_settings().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaPlace {
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperedPlace {
    pub t: f64,
}

/// One split place of the window: in `S` with exponent `sigma`, or
/// tempered around `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowPlace {
    Sigma(SigmaPlace),
    Tempered(TemperedPlace),
}

impl WindowPlace {
    pub fn sigma(&self) -> Option<f64> {
        match self {
            Self::Sigma(s) => Some(s.sigma),
            Self::Tempered(_) => None,
        }
    }
}

/// `B(sigma, T)`, one entry per split place in the setting's order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralWindow {
    pub places: Vec<WindowPlace>,
}

impl SpectralWindow {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn uniform_sigma(count: usize, sigma: f64) -> Self {
        Self { places: vec![WindowPlace::Sigma(SigmaPlace { sigma }); count] }
    }

    pub fn validate(&self, setting: &QuaternionSetting) -> Result<(), GeomError> {
        let n = setting.split_places.len();
        if self.places.len() != n {
            return Err(GeomError::WindowMismatch(format!("{} window entries for {n} split places", self.places.len())));
        }
        for (j, p) in self.places.iter().enumerate() {
            match p {
                WindowPlace::Sigma(s) if !(0.0..=0.5).contains(&s.sigma) => {
                    return Err(GeomError::WindowMismatch(format!("sigma at place {j} is {} outside [0, 1/2]", s.sigma)));
                }
                WindowPlace::Tempered(t) if !t.t.is_finite() => {
                    return Err(GeomError::WindowMismatch(format!("T at place {j} is not finite")));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// `zeta_k(2) Delta_k^{3/2} prod (N p - 1) / (2^{3b+2c} pi^{a+2b+2c})`, the
/// covolume of the unit group of a maximal order.
pub fn borel_volume(setting: &QuaternionSetting, zeta_prime_bound: u64) -> Result<Interval, GeomError> {
    let Signature { a, b, c } = setting.signature;
    let zeta = dedekind_zeta2(&setting.field, zeta_prime_bound);
    let disc = Interval::point(setting.field.disc_abs() as f64);
    let ram: u128 = setting.ram_f.iter().map(|p| p.q as u128 - 1).product();
    let denom = Interval::point(2f64.powi((3 * b + 2 * c) as i32)) * Interval::pi().powi((a + 2 * b + 2 * c) as u32);
    let vol = zeta * disc * disc.sqrt() * Interval::point(ram as f64) / denom;
    let floor = (-7.0f64).exp();
    if vol.lo <= floor {
        return Err(GeomError::InvalidSetting(format!("covolume {vol} is not above e^-7")));
    }
    Ok(vol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeData {
    pub covolume: Interval,
    /// `prod [SL2(O_p) : K_kappa(p^r)]`.
    pub congruence_index: u128,
    pub lattice_volume: Interval,
}

pub fn lattice_volume(setting: &QuaternionSetting, zeta_prime_bound: u64) -> Result<VolumeData, GeomError> {
    let covolume = borel_volume(setting, zeta_prime_bound)?;
    let mut index: u128 = 1;
    for l in &setting.level {
        index *= subgroup_index(l.prime.q, l.r, l.kind, two_torsion(l.prime.p, l.r))?;
    }
    Ok(VolumeData { covolume, congruence_index: index, lattice_volume: covolume * Interval::point(index as f64) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conductor {
    pub value: Interval,
    /// `None` stands for `p = infinity`.
    pub p_sigma: Option<f64>,
    pub two_over_p: f64,
}

/// `C = vol prod_{j not in S} (1 + |T_j|)^{rho_j}` and `p(sigma)`.
pub fn conductor_and_exponent(
    setting: &QuaternionSetting,
    window: &SpectralWindow,
    lattice_volume: Interval,
) -> Result<Conductor, GeomError> {
    window.validate(setting)?;
    let mut value = lattice_volume;
    let mut two_over_p: f64 = 1.0;
    for (sp, wp) in setting.split_places.iter().zip(&window.places) {
        match wp {
            WindowPlace::Tempered(t) => value = value * Interval::point(1.0 + t.t.abs()).powi(sp.kind.rho()),
            WindowPlace::Sigma(s) => two_over_p = two_over_p.min(1.0 - 2.0 * s.sigma),
        }
    }
    let p_sigma = (two_over_p > 0.0).then(|| 2.0 / two_over_p);
    Ok(Conductor { value, p_sigma, two_over_p })
}

/// A spectral parameter at one place: `s in (0, 1/2]` (complementary) or
/// `s = it` (tempered).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralParam {
    Complementary(f64),
    Tempered(f64),
}

/// `p(pi_s) = max_j p(pi_{s_j})` with `p = 2/(1 - 2s)` on the complementary
/// series and 2 on tempered parameters; `None` is infinity.
pub fn p_of_parameters(params: &[SpectralParam]) -> Option<f64> {
    params
        .iter()
        .map(|p| match *p {
            SpectralParam::Complementary(s) => 1.0 - 2.0 * s,
            SpectralParam::Tempered(_) => 1.0,
        })
        .fold(Some(2.0), |acc: Option<f64>, gap| acc.and_then(|a| (gap > 0.0).then(|| a.max(2.0 / gap))))
}

/// `R_{j0} = (7 + log C) / rho_{j0}` at the first place of maximal
/// `sigma`, zero elsewhere. Uses the lower end of `C` so that
/// `sum rho_j R_j <= 7 + log C` holds for the true value.
pub fn choose_r(setting: &QuaternionSetting, window: &SpectralWindow, conductor: &Conductor) -> Vec<f64> {
    let mut r = vec![0.0; setting.split_places.len()];
    let mut best: Option<(usize, f64)> = None;
    for (j, wp) in window.places.iter().enumerate() {
        if let Some(s) = wp.sigma() {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((j, s));
            }
        }
    }
    if let Some((j0, _)) = best {
        let rho = setting.split_places[j0].kind.rho() as f64;
        r[j0] = ((7.0 + conductor.value.lo.ln()) / rho).max(0.0);
    }
    r
}

/// `|x|_j <= e^{rho_j (R_j + 2)}` on `S`, `e^{2 rho_j}` at the other
/// places, ramified real places included. The polycylinder is closed, a
/// harmless enlargement of the open region.
pub fn trace_region(setting: &QuaternionSetting, window: &SpectralWindow, r: &[f64]) -> Result<Polycylinder, GeomError> {
    let mut radii = vec![2f64.exp(); setting.field.places()];
    for (j, sp) in setting.split_places.iter().enumerate() {
        let rho = sp.kind.rho() as f64;
        radii[sp.field_place] = match window.places[j] {
            WindowPlace::Sigma(_) => (rho * (r[j] + 2.0)).exp(),
            WindowPlace::Tempered(_) => (2.0 * rho).exp(),
        };
    }
    Ok(Polycylinder::new(&setting.field, radii)?)
}

/// Smallest `F_hat` over the window at one place: `s in [sigma, 1/2]` on
/// `S`, `s = i tau` with `|tau - T| <= 1` elsewhere. A 201-point grid plus
/// both endpoints.
pub fn window_minimum(f: &TestFn, place: &WindowPlace) -> f64 {
    const GRID: usize = 200;
    match *place {
        WindowPlace::Sigma(SigmaPlace { sigma }) => (0..=GRID)
            .map(|k| sigma + (0.5 - sigma) * k as f64 / GRID as f64)
            .map(|s| f.transform(Complex64::new(s, 0.0)).re)
            .fold(f64::INFINITY, f64::min),
        WindowPlace::Tempered(TemperedPlace { t }) => {
            (0..=GRID).map(|k| t - 1.0 + 2.0 * k as f64 / GRID as f64).map(|tau| f.hat_imag(tau)).fold(f64::INFINITY, f64::min)
        }
    }
}

/// Rows of the regular term for one trace region.
#[derive(Debug, Clone)]
pub struct RowSet {
    pub rows: Vec<LedgerRow>,
    /// Traces with `x^2 - 4` zero or a square.
    pub skipped: usize,
    /// `sum w(x)` over every enumerated trace.
    pub weight_sum: u128,
}

pub fn regular_rows(ctx: &RowContext, region: &Polycylinder, options: &BoundOptions) -> Result<RowSet, GeomError> {
    let field = &ctx.field.field;
    let en = enumerate_polycylinder(field, region, None, options.enumeration_budget as u128)?;
    // Points the enumerator could not place are kept: the sum only grows.
    let mut points = en.points;
    points.extend(en.ambiguous);
    points.sort();
    let results: Vec<Result<Option<LedgerRow>, GeomError>> = points
        .par_iter()
        .map(|x| match ctx.per_class_bound(x) {
            Ok(row) => Ok(Some(row)),
            Err(GeomError::CentralTrace) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut skipped = 0;
    let mut weight_sum: u128 = 0;
    for (x, res) in points.iter().zip(results) {
        match res? {
            Some(row) => {
                weight_sum += row.weight as u128;
                rows.push(row);
            }
            None => {
                skipped += 1;
                weight_sum += ctx.weight(x)? as u128;
            }
        }
    }
    Ok(RowSet { rows, skipped, weight_sum })
}

/// Per-place data of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaceSummary {
    pub field_place: usize,
    pub kind: ArchPlace,
    pub window: WindowPlace,
    pub variant: Variant,
    pub support_radius: f64,
    /// `F(+-id)`, from spherical inversion at height 0.
    pub f_at_identity: f64,
    pub hc_sup: f64,
    /// Bound for `|Delta|^{1/2} |O(gamma, F)|` at this place.
    pub arch_factor: f64,
    pub spectral_min: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSummary {
    pub count: usize,
    pub skipped_central: usize,
    pub omega_coarse: usize,
    pub disc_coarse: usize,
    pub l_elementary: usize,
    pub l_nonrigorous: usize,
    pub zero_weight: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `S` is empty: the count is bounded by the volume alone.
    WeylLaw,
    NonTempered,
}

/// Measured quantities attached to the structural inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportChecks {
    /// `max |N Delta(gamma)| / C^2` over the rows.
    pub max_disc_over_c2: f64,
    pub weight_sum: u128,
    /// `prod` of local integrals of `w`.
    pub weight_integral: Ratio<u128>,
    /// `prod` of the local integral bounds, at most `2^{omega(n)} 8^d`.
    pub weight_integral_bound: u128,
    pub weight_integral_cap: u128,
    /// `sum w / (Delta^{-1/2} vol(region) int w)`.
    pub weight_sum_ratio: f64,
    pub region_volume: f64,
    /// `vol(region) / (e^7 C)`.
    pub region_volume_ratio: f64,
    /// `max 2^omega / |N Delta|^{1/4}` over the rows.
    pub two_power_omega: f64,
    /// `2^{|ram_f|} / prod (N p - 1)^{1/4}`.
    pub two_power_ram: f64,
    /// Every row's four normalization factors telescope to `e^R`.
    pub self_normalization: bool,
    pub rows_nonnegative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantNote {
    pub name: String,
    pub value: f64,
    /// `asserted`, `measured` or `exact`.
    pub origin: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricBoundReport {
    pub setting: SettingInput,
    pub window: SpectralWindow,
    pub options: BoundOptions,
    pub volume: VolumeData,
    pub conductor: Conductor,
    pub r: Vec<f64>,
    /// `sum rho_j R_j`.
    pub r_total: f64,
    pub region_radii: Vec<f64>,
    pub places: Vec<PlaceSummary>,
    /// `2^c`, the ramified archimedean places.
    pub ramified_factor: f64,
    pub central: Interval,
    pub rows: RowSummary,
    pub regular: Interval,
    /// `min F_hat` over the window, multiplied over places.
    pub spectral_min: f64,
    /// `e^{-sum 2 rho_j R_j sigma_j}`.
    pub savings: f64,
    /// `spectral_min * savings`.
    pub normalized_lower: f64,
    /// `(central + regular) / spectral_min`.
    pub final_bound: Interval,
    /// `C^{2/p(sigma)}`.
    pub reference: f64,
    pub ratio_to_reference: f64,
    pub regime: Regime,
    pub checks: ReportChecks,
    pub constants: Vec<ConstantNote>,
    #[serde(skip)]
    pub ledger: Vec<LedgerRow>,
}

impl GeometricBoundReport {
    /// `e^{sum rho_j R_j}` as an interval.
    pub fn e_r(&self) -> Interval {
        Interval::approx(self.r_total).exp()
    }
}

/// Assembles reports for one setting, caching rows and test functions so
/// that windows sharing `R` reuse them.
pub struct BoundEngine {
    setting: QuaternionSetting,
    options: BoundOptions,
    volume: VolumeData,
    ctx: RowContext,
    rows: HashMap<Vec<u64>, Arc<RowSet>>,
    testfns: HashMap<(ArchPlace, u64, bool), Arc<TestFn>>,
}

impl BoundEngine {
    pub fn new(setting: QuaternionSetting, options: BoundOptions) -> Result<Self, GeomError> {
        if !(options.c_abs >= 4.0) {
            return Err(GeomError::InvalidSetting(format!("C_abs must be at least 4, got {}", options.c_abs)));
        }
        let volume = lattice_volume(&setting, options.zeta_prime_bound)?;
        let ctx = RowContext::new(&setting, &options)?;
        Ok(Self { setting, options, volume, ctx, rows: HashMap::new(), testfns: HashMap::new() })
    }

    pub fn setting(&self) -> &QuaternionSetting {
        &self.setting
    }

    pub fn volume(&self) -> VolumeData {
        self.volume
    }

    fn testfn(&mut self, kind: ArchPlace, variant: Variant) -> Result<Arc<TestFn>, GeomError> {
        let key = match variant {
            Variant::Nontempered { r } => (kind, r.to_bits(), false),
            Variant::Tempered { t } => (kind, t.to_bits(), true),
        };
        if let Some(f) = self.testfns.get(&key) {
            return Ok(f.clone());
        }
        let f = Arc::new(build_testfn(kind, variant)?);
        self.testfns.insert(key, f.clone());
        Ok(f)
    }

    fn rows_for(&mut self, region: &Polycylinder) -> Result<Arc<RowSet>, GeomError> {
        let key: Vec<u64> = region.radii.iter().map(|r| r.to_bits()).collect();
        if let Some(rs) = self.rows.get(&key) {
            return Ok(rs.clone());
        }
        let rs = Arc::new(regular_rows(&self.ctx, region, &self.options)?);
        self.rows.insert(key, rs.clone());
        Ok(rs)
    }

    pub fn bound(&mut self, window: &SpectralWindow) -> Result<GeometricBoundReport, GeomError> {
        let setting = self.setting.clone();
        let conductor = conductor_and_exponent(&setting, window, self.volume.lattice_volume)?;
        let r = choose_r(&setting, window, &conductor);
        let r_total: f64 = setting.split_places.iter().zip(&r).map(|(sp, rj)| sp.kind.rho() as f64 * rj).sum();
        let region = trace_region(&setting, window, &r)?;

        let mut places = Vec::new();
        let mut f_identity = 1.0;
        // Each ramified real place contributes |Delta|^{1/2} < 2.
        let mut arch = 2f64.powi(setting.signature.c as i32);
        let mut spectral_min = 1.0;
        let mut exponent = 0.0;
        for (j, (sp, wp)) in setting.split_places.iter().zip(&window.places).enumerate() {
            let variant = match wp {
                WindowPlace::Sigma(s) => {
                    exponent += 2.0 * sp.kind.rho() as f64 * r[j] * s.sigma;
                    Variant::Nontempered { r: r[j] }
                }
                WindowPlace::Tempered(t) => Variant::Tempered { t: t.t },
            };
            let f = self.testfn(sp.kind, variant)?;
            let hc_sup = f.hc_sup();
            let arch_factor = match sp.kind {
                ArchPlace::Real => PI * hc_sup,
                ArchPlace::Complex => hc_sup,
            };
            let f0 = f.pointwise(0.0);
            let smin = window_minimum(&f, wp);
            f_identity *= f0;
            arch *= arch_factor;
            spectral_min *= smin;
            places.push(PlaceSummary {
                field_place: sp.field_place,
                kind: sp.kind,
                window: *wp,
                variant,
                support_radius: f.support_radius(),
                f_at_identity: f0,
                hc_sup,
                arch_factor,
                spectral_min: smin,
            });
        }
        if !(spectral_min > 0.0) {
            return Err(GeomError::DegenerateWindow(spectral_min));
        }

        // F(id) + F(-id) = 2 F(0); quadrature error is far below 1e-8.
        let central = Interval::point(2.0) * self.volume.lattice_volume * Interval::point(f_identity).widen_rel(1e-8);

        let rowset = self.rows_for(&region)?;
        let arch_iv = Interval::point(arch).widen_rel(1e-9);
        let mut ledger = rowset.rows.clone();
        let mut regular = Interval::point(0.0);
        let mut summary = RowSummary { count: ledger.len(), skipped_central: rowset.skipped, ..Default::default() };
        for row in &mut ledger {
            row.arch = arch;
            row.total = row.arithmetic * arch_iv;
            regular = regular + row.total;
            summary.omega_coarse += row.flags.omega_coarse as usize;
            summary.disc_coarse += row.flags.disc_coarse as usize;
            summary.l_elementary += row.flags.l_elementary as usize;
            summary.l_nonrigorous += row.flags.l_nonrigorous as usize;
            summary.zero_weight += (row.weight == 0) as usize;
        }

        let savings = (-exponent).exp();
        let final_bound = (central + regular) / Interval::point(spectral_min);
        let reference = conductor.value.hi.powf(conductor.two_over_p);
        let regime = if window.places.iter().all(|w| w.sigma().is_none()) { Regime::WeylLaw } else { Regime::NonTempered };

        let e_r = Interval::approx(r_total).exp();
        let checks = self.checks(&ledger, &rowset, &region, &conductor, e_r)?;
        let constants = vec![
            ConstantNote { name: "C_abs".into(), value: self.options.c_abs, origin: "asserted".into() },
            ConstantNote { name: "tau_T".into(), value: 2.0, origin: "asserted".into() },
            ConstantNote { name: "ramified_place_factor".into(), value: 2.0, origin: "exact".into() },
            ConstantNote { name: "arch_product".into(), value: arch, origin: "measured".into() },
            ConstantNote { name: "spectral_min".into(), value: spectral_min, origin: "measured".into() },
            ConstantNote { name: "weight_sum_ratio".into(), value: checks.weight_sum_ratio, origin: "measured".into() },
            ConstantNote { name: "max_disc_over_c2".into(), value: checks.max_disc_over_c2, origin: "measured".into() },
        ];
        Ok(GeometricBoundReport {
            setting: setting.input.clone(),
            window: window.clone(),
            options: self.options.clone(),
            volume: self.volume,
            conductor,
            r,
            r_total,
            region_radii: region.radii.clone(),
            places,
            ramified_factor: 2f64.powi(setting.signature.c as i32),
            central,
            rows: summary,
            regular,
            spectral_min,
            savings,
            normalized_lower: spectral_min * savings,
            ratio_to_reference: final_bound.hi / reference,
            final_bound,
            reference,
            regime,
            checks,
            constants,
            ledger,
        })
    }

    fn checks(
        &self,
        ledger: &[LedgerRow],
        rowset: &RowSet,
        region: &Polycylinder,
        conductor: &Conductor,
        e_r: Interval,
    ) -> Result<ReportChecks, GeomError> {
        let setting = &self.setting;
        let field = &setting.field;
        let c_lo = conductor.value.lo;
        let max_disc_over_c2 = ledger.iter().map(|r| r.disc_norm as f64 / (c_lo * c_lo)).fold(0.0, f64::max);
        let mut weight_integral = Ratio::from_integer(1u128);
        let mut weight_integral_bound: u128 = 1;
        for l in &setting.level {
            weight_integral *= weight_local_integral(l.prime.q, l.prime.p, l.r, l.kind)?;
            weight_integral_bound *= local_integral_bound(l.prime.p, l.kind);
        }
        let weight_integral_cap = (1u128 << setting.level.len()) * 8u128.pow(field.degree() as u32);
        let region_volume = region.volume(field);
        let int_w = *weight_integral.numer() as f64 / *weight_integral.denom() as f64;
        let scale = region_volume / (field.disc_abs() as f64).sqrt() * int_w;
        let two_power_omega =
            ledger.iter().map(|r| 2f64.powi(r.omega as i32) / (r.disc_norm as f64).powf(0.25)).fold(0.0, f64::max);
        let ram_norm: f64 = setting.ram_f.iter().map(|p| (p.q - 1) as f64).product();
        Ok(ReportChecks {
            max_disc_over_c2,
            weight_sum: rowset.weight_sum,
            weight_integral,
            weight_integral_bound,
            weight_integral_cap,
            weight_sum_ratio: rowset.weight_sum as f64 / scale,
            region_volume,
            region_volume_ratio: region_volume / (7f64.exp() * conductor.value.lo),
            two_power_omega,
            two_power_ram: 2f64.powi(setting.ram_count() as i32) / ram_norm.powf(0.25),
            self_normalization: ledger.iter().all(|r| r.normalization.telescopes(e_r)),
            rows_nonnegative: ledger.iter().all(|r| r.total.lo >= 0.0),
        })
    }
}

/// One-shot version of [`BoundEngine::bound`].
pub fn geometric_and_multiplicity_bound(
    setting: &QuaternionSetting,
    window: &SpectralWindow,
    options: &BoundOptions,
) -> Result<GeometricBoundReport, GeomError> {
    BoundEngine::new(setting.clone(), options.clone())?.bound(window)
}

/// The points of `O` in a trace region, in coordinate order.
pub fn count_traces(setting: &QuaternionSetting, region: &Polycylinder, budget: u64) -> Result<Vec<FieldElement>, GeomError> {
    let en = enumerate_polycylinder(&setting.field, region, None, budget as u128)?;
    let mut pts = en.points;
    pts.extend(en.ambiguous);
    pts.sort();
    Ok(pts)
}

#[cfg(test)]
mod tests;
