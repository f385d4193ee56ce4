//! Local non-archimedean data at a prime `p` with residue field of size `q = p`:
//! splitting types of traces, congruence-subgroup indices, the weight
//! functions `w_j^r` and their exact local integrals.

use crate::arith::{self, checked_pow, rem, valuation};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Residue enumeration cap per local integral.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error("precision p^{have} is too small to decide (need p^{need})")]
    InsufficientPrecision { need: u32, have: u32 },
    #[error("trace {0} is central: x^2 - 4 = 0")]
    CentralElement(i128),
    #[error("index q^(3r)(1-q^-2)/t is not an integer for q={q}, r={r}, t={t}")]
    NonIntegerIndex { q: u64, r: u32, t: u64 },
    #[error("residue enumeration needs {states} states, budget is {budget}")]
    EnumerationBudgetExceeded { states: u64, budget: u64 },
    #[error("nu = {nu} is impossible for type {kind}")]
    InconsistentType { kind: &'static str, nu: String },
    #[error("only prime residue fields are supported (q={q}, p={p})")]
    UnsupportedResidueField { q: u64, p: u64 },
    #[error("j must be 0 or 1, got {0}")]
    InvalidSubgroup(u8),
}

/// How a regular semisimple element sits in `SL2(Q_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum SplittingType {
    Split,
    EllipticUnramified,
    EllipticRamifiedTame,
    EllipticRamifiedWild,
}

impl SplittingType {
    pub fn is_ramified(self) -> bool {
        matches!(self, Self::EllipticRamifiedTame | Self::EllipticRamifiedWild)
    }

    /// The exponent `lambda` of the orbital-integral bound: 1 when the
    /// centralizer field is ramified, 0 otherwise.
    pub fn lambda(self) -> u32 {
        u32::from(self.is_ramified())
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Split => "split",
            Self::EllipticUnramified => "elliptic-unramified",
            Self::EllipticRamifiedTame => "tame-ramified",
            Self::EllipticRamifiedWild => "wild-ramified",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "split" => Some(Self::Split),
            "elliptic-unramified" | "unramified" | "eu" => Some(Self::EllipticUnramified),
            "tame-ramified" | "elliptic-ramified-tame" | "tame" | "ramified" => Some(Self::EllipticRamifiedTame),
            "wild-ramified" | "elliptic-ramified-wild" | "wild" => Some(Self::EllipticRamifiedWild),
            _ => None,
        }
    }
}

/// A nonnegative half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt(pub u32);

impl HalfInt {
    pub fn from_twice(twice: u32) -> Self {
        Self(twice)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn is_integral(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn floor(self) -> u32 {
        self.0 / 2
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn parse(s: &str) -> Option<Self> {
        if let Some((a, b)) = s.split_once('/') {
            let (a, b): (u32, u32) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            return match b {
                1 => Some(Self(2 * a)),
                2 => Some(Self(a)),
                _ => None,
            };
        }
        let x: f64 = s.trim().parse().ok()?;
        let twice = (2.0 * x).round();
        ((2.0 * x - twice).abs() < 1e-12 && twice >= 0.0).then_some(Self(twice as u32))
    }
}

impl std::fmt::Display for HalfInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// A trace given either as an exact integer or as a residue modulo `p^M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceResidue {
    pub value: i128,
    /// `None` means `value` is the exact trace.
    pub precision: Option<u32>,
}

impl TraceResidue {
    pub fn exact(value: i128) -> Self {
        Self { value, precision: None }
    }

    pub fn modulo(value: i128, precision: u32) -> Self {
        Self { value, precision: Some(precision) }
    }
}

/// What is known about `x^2 - 4` at `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DiscKnowledge {
    /// `x^2 - 4 = 0` exactly.
    Zero,
    /// Only `v_p(x^2 - 4) >= bound` is known.
    AtLeast(u32),
    /// Exact valuation; `unit_digits` p-adic digits of the unit part known.
    Exact { valuation: u32, unit: u64, unit_digits: u32 },
}

fn disc_knowledge(p: u64, trace: TraceResidue) -> DiscKnowledge {
    match trace.precision {
        None => {
            let x = trace.value;
            let d = x * x - 4;
            if d == 0 {
                return DiscKnowledge::Zero;
            }
            let v = valuation(p, d).expect("nonzero");
            let unit = d / (p as i128).pow(v);
            // 8 digits are plenty for any square-class decision.
            let digits = 8;
            let m = p.pow(digits);
            DiscKnowledge::Exact { valuation: v, unit: rem(unit, m), unit_digits: digits }
        }
        Some(prec) => {
            let m = checked_pow(p, prec).expect("precision fits in u64") as u128;
            let x = rem(trace.value, m as u64) as u128;
            let d = ((x * x % m) + m - 4 % m) % m;
            if d == 0 {
                return DiscKnowledge::AtLeast(prec);
            }
            let v = valuation(p, d as i128).expect("nonzero");
            let unit = (d / (p as u128).pow(v)) as u64;
            DiscKnowledge::Exact { valuation: v, unit, unit_digits: prec - v }
        }
    }
}

/// Whether a unit with `digits` known p-adic digits is a square; `None` if
/// undecidable at that precision.
fn unit_is_square(p: u64, unit: u64, digits: u32) -> Option<bool> {
    if p == 2 {
        (digits >= 3).then_some(unit % 8 == 1)
    } else {
        (digits >= 1).then(|| arith::jacobi(unit as i128, p) == 1)
    }
}

/// The 2-adic valuation of 4 in `Q_p`, i.e. `v_p(4)`.
pub fn v_four(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        0
    }
}

/// A regular semisimple local trace with certified splitting data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaLocal {
    pub q: u64,
    pub p: u64,
    /// `None` for data built directly from `(type, nu)`.
    pub trace: Option<TraceResidue>,
    /// `v_p(x^2 - 4)`.
    pub disc_valuation: u32,
    /// `nu = v_p(x^2 - 4) / 2`.
    pub nu: HalfInt,
    pub kind: SplittingType,
}

impl GammaLocal {
    /// Local datum from its type and `nu` alone, checking the parity rules
    /// (integral `nu` for split and unramified, half-odd `nu` when tame).
    pub fn from_type(q: u64, kind: SplittingType, nu: HalfInt) -> Result<Self, LocalError> {
        check_prime_field(q, q)?;
        let consistent = match kind {
            SplittingType::Split | SplittingType::EllipticUnramified => nu.is_integral(),
            SplittingType::EllipticRamifiedTame => !nu.is_integral() && q != 2,
            SplittingType::EllipticRamifiedWild => q == 2 && nu.twice() >= 2,
        };
        if !consistent {
            return Err(LocalError::InconsistentType { kind: kind.label(), nu: nu.to_string() });
        }
        Ok(Self { q, p: q, trace: None, disc_valuation: nu.twice(), nu, kind })
    }

    pub fn lambda(&self) -> u32 {
        self.kind.lambda()
    }
}

fn check_prime_field(q: u64, p: u64) -> Result<(), LocalError> {
    if q != p || !arith::is_prime(p) {
        return Err(LocalError::UnsupportedResidueField { q, p });
    }
    Ok(())
}

/// Classify the trace residue `x` over `Q_p`.
pub fn classify_splitting(q: u64, p: u64, trace: TraceResidue) -> Result<GammaLocal, LocalError> {
    check_prime_field(q, p)?;
    let (valuation, unit, unit_digits) = match disc_knowledge(p, trace) {
        DiscKnowledge::Zero => return Err(LocalError::CentralElement(trace.value)),
        DiscKnowledge::AtLeast(m) => {
            return Err(LocalError::InsufficientPrecision { need: m + 1, have: m })
        }
        DiscKnowledge::Exact { valuation, unit, unit_digits } => (valuation, unit, unit_digits),
    };
    if let Some(m) = trace.precision {
        let need = valuation + 2 * v_four(p) + 3;
        if m < need {
            return Err(LocalError::InsufficientPrecision { need, have: m });
        }
    }
    let square = unit_is_square(p, unit, unit_digits).expect("precision policy guarantees digits");
    let kind = if p == 2 {
        match (valuation % 2 == 0, unit % 8) {
            (true, 1) => SplittingType::Split,
            (true, 5) => SplittingType::EllipticUnramified,
            _ => SplittingType::EllipticRamifiedWild,
        }
    } else if valuation % 2 == 1 {
        SplittingType::EllipticRamifiedTame
    } else if square {
        SplittingType::Split
    } else {
        SplittingType::EllipticUnramified
    };
    Ok(GammaLocal { q, p, trace: Some(trace), disc_valuation: valuation, nu: HalfInt(valuation), kind })
}

/// Congruence subgroup type: `K0(p^r)` (`j = 0`) or `K1(p^r)` (`j = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubgroupKind {
    K0,
    K1,
}

impl SubgroupKind {
    pub fn from_j(j: u8) -> Option<Self> {
        match j {
            0 => Some(Self::K0),
            1 => Some(Self::K1),
            _ => None,
        }
    }

    pub fn j(self) -> u8 {
        match self {
            Self::K0 => 0,
            Self::K1 => 1,
        }
    }
}

/// Local level datum: `r = v_p(n)` and the subgroup type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelLocal {
    pub r: u32,
    pub kind: SubgroupKind,
}

/// Size of the 2-torsion of `(Z/p^r)^x`.
pub fn two_torsion(p: u64, r: u32) -> u64 {
    match (p, r) {
        (_, 0) => 1,
        (2, 1) => 1,
        (2, 2) => 2,
        (2, _) => 4,
        _ => 2,
    }
}

/// `[SL2(o) : K_j(p^r)]`.
pub fn subgroup_index(q: u64, r: u32, kind: SubgroupKind, two_torsion: u64) -> Result<u128, LocalError> {
    if r == 0 {
        return Ok(1);
    }
    let q = q as u128;
    match kind {
        SubgroupKind::K0 => Ok(q.pow(r) + q.pow(r - 1)),
        SubgroupKind::K1 => {
            let num = q.pow(3 * r - 2) * (q * q - 1);
            let t = two_torsion as u128;
            if t == 0 || !num.is_multiple_of(t) {
                return Err(LocalError::NonIntegerIndex { q: q as u64, r, t: two_torsion });
            }
            Ok(num / t)
        }
    }
}

/// Argument of [`weight_w`]: a classified element or a raw trace.
#[derive(Debug, Clone, Copy)]
pub enum WeightArg<'a> {
    Gamma(&'a GammaLocal),
    Trace(TraceResidue),
}

/// The weight `w_j^r` at a trace or classified element.
pub fn weight_w(q: u64, p: u64, r: u32, kind: SubgroupKind, arg: WeightArg<'_>) -> Result<u64, LocalError> {
    check_prime_field(q, p)?;
    let qpow = |e: u32| q.pow(e);
    match arg {
        WeightArg::Gamma(g) => {
            let v = g.disc_valuation;
            Ok(match kind {
                SubgroupKind::K1 => {
                    if v >= 2 * r {
                        qpow(2 * r)
                    } else {
                        0
                    }
                }
                SubgroupKind::K0 => match g.kind {
                    SplittingType::Split => qpow(g.nu.floor().min(r / 2)),
                    _ => {
                        if v >= r {
                            qpow(r / 2)
                        } else {
                            0
                        }
                    }
                },
            })
        }
        WeightArg::Trace(trace) => {
            let know = disc_knowledge(p, trace);
            // Decide `v >= threshold`.
            let at_least = |threshold: u32| -> Result<bool, LocalError> {
                match know {
                    DiscKnowledge::Zero => Ok(true),
                    DiscKnowledge::AtLeast(m) if m >= threshold => Ok(true),
                    DiscKnowledge::AtLeast(m) => {
                        Err(LocalError::InsufficientPrecision { need: threshold, have: m })
                    }
                    DiscKnowledge::Exact { valuation, .. } => Ok(valuation >= threshold),
                }
            };
            match kind {
                SubgroupKind::K1 => Ok(if at_least(2 * r)? { qpow(2 * r) } else { 0 }),
                SubgroupKind::K0 => {
                    if at_least(r)? {
                        return Ok(qpow(r / 2));
                    }
                    let DiscKnowledge::Exact { valuation, unit, unit_digits } = know else {
                        unreachable!("v < r implies an exact valuation")
                    };
                    if valuation % 2 == 1 {
                        return Ok(0);
                    }
                    let need_digits = if p == 2 { 3 } else { 1 };
                    let square = unit_is_square(p, unit, unit_digits).ok_or(
                        LocalError::InsufficientPrecision {
                            need: valuation + need_digits,
                            have: valuation + unit_digits,
                        },
                    )?;
                    Ok(if square { qpow(valuation / 2) } else { 0 })
                }
            }
        }
    }
}

/// Residue precision used for the local integral: `2r + 2 v_p(4) + 2`.
pub fn integral_precision(p: u64, r: u32) -> u32 {
    2 * r + 2 * v_four(p) + 2
}

/// `int_{Z_p} w_j^r` under the Haar probability measure, by enumerating all
/// residues modulo `p^m`.
pub fn weight_local_integral_at(q: u64, p: u64, r: u32, kind: SubgroupKind, m: u32) -> Result<Ratio<u128>, LocalError> {
    check_prime_field(q, p)?;
    let states = checked_pow(p, m).filter(|&s| s <= ENUMERATION_BUDGET).ok_or(
        LocalError::EnumerationBudgetExceeded {
            states: checked_pow(p, m).unwrap_or(u64::MAX),
            budget: ENUMERATION_BUDGET,
        },
    )?;
    let mut total: u128 = 0;
    for x in 0..states {
        total += weight_w(q, p, r, kind, WeightArg::Trace(TraceResidue::modulo(x as i128, m)))? as u128;
    }
    Ok(Ratio::new(total, states as u128))
}

pub fn weight_local_integral(q: u64, p: u64, r: u32, kind: SubgroupKind) -> Result<Ratio<u128>, LocalError> {
    weight_local_integral_at(q, p, r, kind, integral_precision(p, r))
}

/// Upper bound for the local integral: 1 or `2|4|^-1` for `K0`, 2 or
/// `4|4|^-1` for `K1`, depending on whether `p` divides 2.
pub fn local_integral_bound(p: u64, kind: SubgroupKind) -> u128 {
    let inv_abs_four = 4u128.pow(u32::from(p == 2));
    match (kind, p == 2) {
        (SubgroupKind::K0, false) => 1,
        (SubgroupKind::K0, true) => 2 * inv_abs_four,
        (SubgroupKind::K1, false) => 2,
        (SubgroupKind::K1, true) => 4 * inv_abs_four,
    }
}

/// Local component at `p` of the periodicity modulus: `4 p^r` for `K0`,
/// `p^(2r)` for `K1`.
pub fn local_period(p: u64, r: u32, kind: SubgroupKind) -> u64 {
    match kind {
        SubgroupKind::K0 => p.pow(r + v_four(p)),
        SubgroupKind::K1 => p.pow(2 * r),
    }
}

/// One prime of the level: residue characteristic, norm, `r`, `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelPrime {
    pub p: u64,
    pub norm: u64,
    pub r: u32,
    pub kind: SubgroupKind,
}

/// The periodicity ideal `n' = 4 * prod p^((1+kappa) r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicModulus {
    /// Exponent of each level prime in `n'` beyond the factor 4.
    pub level_exponents: Vec<(LevelPrime, u32)>,
    /// `N(n') = 4^d * prod N(p)^exponent`.
    pub norm: u128,
}

impl PeriodicModulus {
    /// For `k = Q`, the positive generator of `n'`.
    pub fn rational_generator(&self) -> u128 {
        self.norm
    }
}

pub fn periodic_modulus(degree: u32, level: &[LevelPrime]) -> PeriodicModulus {
    let mut norm = 4u128.pow(degree);
    let mut level_exponents = Vec::new();
    for lp in level {
        let e = (1 + u32::from(lp.kind.j())) * lp.r;
        norm *= (lp.norm as u128).pow(e);
        level_exponents.push((*lp, e));
    }
    PeriodicModulus { level_exponents, norm }
}

/// Points `(q, r, j)` at which to tabulate the local weight integral; `p`
/// defaults to `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalGrid {
    pub points: Vec<GridPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub q: u64,
    #[serde(default)]
    pub p: Option<u64>,
    pub r: u32,
    pub j: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRow {
    pub q: u64,
    pub p: u64,
    pub r: u32,
    pub j: u8,
    pub value_num: u128,
    pub value_den: u128,
    pub bound: u128,
    pub ok: bool,
}

impl LocalGrid {
    pub fn evaluate(&self) -> Result<Vec<GridRow>, LocalError> {
        self.points
            .iter()
            .map(|pt| {
                let p = pt.p.unwrap_or(pt.q);
                let kind = SubgroupKind::from_j(pt.j).ok_or(LocalError::InvalidSubgroup(pt.j))?;
                let value = weight_local_integral(pt.q, p, pt.r, kind)?;
                let bound = local_integral_bound(p, kind);
                Ok(GridRow {
                    q: pt.q,
                    p,
                    r: pt.r,
                    j: pt.j,
                    value_num: *value.numer(),
                    value_den: *value.denom(),
                    bound,
                    ok: value <= Ratio::from_integer(bound),
                })
            })
            .collect()
    }
}

pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from("q,p,r,j,value_num,value_den,bound,ok\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{},{},{},{}\n", r.q, r.p, r.r, r.j, r.value_num, r.value_den, r.bound, r.ok));
    }
    out
}
