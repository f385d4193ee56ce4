//! Orbital integrals of `1_{K_j(p^r)}` on the Bruhat–Tits tree of `SL2(Q_p)`.
//!
//! The fixed-point set of a regular semisimple `gamma` is a tube around an
//! apartment (split), a ball around a vertex (unramified elliptic) or a ball
//! around an edge (ramified elliptic). [`count_fixed_closed`] counts the
//! relevant configurations from the shape alone; [`count_fixed_bruteforce`]
//! acts with an explicit matrix on vertex representatives and serves as its
//! oracle.

mod brute;
mod closed;
pub mod qp;
mod realize;

pub use brute::{count_fixed_bruteforce, BruteForceReport, TreeVertex};
pub use closed::count_fixed_closed;
pub use realize::{realize_gamma, IntMatrix, Realization};

use crate::padic_local::{
    subgroup_index, two_torsion, weight_w, GammaLocal, HalfInt, LocalError, SplittingType, SubgroupKind,
    WeightArg,
};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Cap on the number of walk states or vertices visited by one count.
pub const TREE_BUDGET: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("enumeration for radius {radius} exceeds the budget")]
    UnsupportedRadius { radius: u32 },
    #[error("p-adic precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("fixed set reaches the truncation sphere of radius {radius}")]
    TruncationTooSmall { radius: u32 },
    #[error("no integral trace of type {kind} with nu = {nu} over Q_{p}")]
    Unrealizable { p: u64, kind: &'static str, nu: String },
    #[error(transparent)]
    Local(#[from] LocalError),
}

/// Parity type of a vertex: the two `SL2`-orbits on the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Self::Even
        } else {
            Self::Odd
        }
    }

    pub fn flip_by(self, steps: u32) -> Self {
        if steps.is_multiple_of(2) {
            self
        } else {
            match self {
                Self::Even => Self::Odd,
                Self::Odd => Self::Even,
            }
        }
    }
}

/// Shape of the fixed-point set `X^gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum FixedSetDescriptor {
    /// Vertices within `nu` of an apartment.
    TubeApartment { nu: u32 },
    /// Vertices within `nu` of a vertex of the given parity.
    BallVertex { nu: u32, center: Parity },
    /// Vertices within `radius` of a closed edge. `exact` is false in the
    /// wild case, where the ball only contains the fixed set.
    BallEdge { radius: u32, exact: bool },
}

impl FixedSetDescriptor {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Self::BallEdge { exact: false, .. })
    }

    pub fn radius(&self) -> u32 {
        match *self {
            Self::TubeApartment { nu } | Self::BallVertex { nu, .. } => nu,
            Self::BallEdge { radius, .. } => radius,
        }
    }
}

/// The fixed-set shape of a local datum. The ball in the unramified case is
/// centred at an even vertex; use [`fixed_set_with_center`] for the other
/// conjugacy class under `GL2`.
pub fn fixed_set(gamma: &GammaLocal) -> FixedSetDescriptor {
    fixed_set_with_center(gamma, Parity::Even)
}

pub fn fixed_set_with_center(gamma: &GammaLocal, center: Parity) -> FixedSetDescriptor {
    let nu = gamma.nu;
    match gamma.kind {
        SplittingType::Split => FixedSetDescriptor::TubeApartment { nu: nu.floor() },
        SplittingType::EllipticUnramified => FixedSetDescriptor::BallVertex { nu: nu.floor(), center },
        // Distance to a closed edge at most nu - 1/2, i.e. depth <= floor(nu - 1/2).
        SplittingType::EllipticRamifiedTame => {
            FixedSetDescriptor::BallEdge { radius: (nu.twice() - 1) / 2, exact: true }
        }
        SplittingType::EllipticRamifiedWild => {
            FixedSetDescriptor::BallEdge { radius: (nu.twice() - 1) / 2, exact: false }
        }
    }
}

/// A count of configurations together with the orbital integral it yields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitalCount {
    pub count: u128,
    /// False when the count is only an upper bound (wild ramification).
    pub exact: bool,
    /// `O(gamma, 1_{K_j(p^r)}) = vol_factor * count`.
    pub value: Ratio<u128>,
}

impl OrbitalCount {
    pub(crate) fn new(q: u64, r: u32, kind: SubgroupKind, count: u128, exact: bool) -> Result<Self, TreeError> {
        let value = match kind {
            SubgroupKind::K0 => Ratio::new(count, subgroup_index(q, r, kind, 1)?),
            SubgroupKind::K1 => Ratio::from_integer(count),
        };
        Ok(Self { count, exact, value })
    }
}

/// `q^{-nu} * O` together with the bound side of the orbital-integral
/// estimate and their ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub o_prime: f64,
    /// `q^{-lambda/2} vol(K_j(p^r)) w_j^r(gamma)`.
    pub bound: f64,
    pub weight: u64,
    pub volume: Ratio<u128>,
    /// `o_prime / bound` as an exact rational when the powers of `q` are
    /// integral; zero when both sides vanish.
    pub ratio_exact: Option<Ratio<u128>>,
    pub ratio: f64,
    /// When `|Delta| = 1`: whether `O <= vol(K_j)` holds.
    pub unit_discriminant_clause: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalOrbital {
    pub q: u64,
    pub kind: SplittingType,
    pub nu: HalfInt,
    pub r: u32,
    pub j: u8,
    pub descriptor: FixedSetDescriptor,
    pub count: OrbitalCount,
    pub verification: VerificationRecord,
}

/// Volume of `K_j(p^r)` in `SL2(Z_p)` with total mass 1.
pub fn subgroup_volume(q: u64, r: u32, kind: SubgroupKind) -> Result<Ratio<u128>, TreeError> {
    Ok(Ratio::new(1, subgroup_index(q, r, kind, two_torsion(q, r))?))
}

/// Orbital integral with its verification record.
pub fn orbital_integral_nonarch(q: u64, gamma: &GammaLocal, r: u32, kind: SubgroupKind) -> Result<LocalOrbital, TreeError> {
    orbital_integral_with_center(q, gamma, r, kind, Parity::Even)
}

pub fn orbital_integral_with_center(
    q: u64,
    gamma: &GammaLocal,
    r: u32,
    kind: SubgroupKind,
    center: Parity,
) -> Result<LocalOrbital, TreeError> {
    let descriptor = fixed_set_with_center(gamma, center);
    let count = count_fixed_closed(q, &descriptor, r, kind)?;
    let verification = verify(q, gamma, r, kind, &count)?;
    Ok(LocalOrbital { q, kind: gamma.kind, nu: gamma.nu, r, j: kind.j(), descriptor, count, verification })
}

fn verify(q: u64, gamma: &GammaLocal, r: u32, kind: SubgroupKind, count: &OrbitalCount) -> Result<VerificationRecord, TreeError> {
    let weight = weight_w(q, gamma.p, r, kind, WeightArg::Gamma(gamma))?;
    let volume = subgroup_volume(q, r, kind)?;
    let to_f = |x: Ratio<u128>| *x.numer() as f64 / *x.denom() as f64;
    let qf = q as f64;
    let o_prime = to_f(count.value) * qf.powf(-gamma.nu.as_f64());
    let lambda = gamma.lambda();
    let bound = qf.powf(-(lambda as f64) / 2.0) * to_f(volume) * weight as f64;
    // ratio = O * q^{(lambda - 2 nu)/2} / (vol * w); the exponent is integral
    // except for wild data with integral nu.
    let shift = lambda as i64 - gamma.nu.twice() as i64;
    let ratio_exact = if shift % 2 == 0 && weight > 0 {
        let e = (-shift / 2) as u32;
        Some(count.value / (volume * Ratio::from_integer(weight as u128) * Ratio::from_integer((q as u128).pow(e))))
    } else if weight == 0 && count.count == 0 {
        Some(Ratio::from_integer(0))
    } else {
        None
    };
    let ratio = match ratio_exact {
        Some(x) => to_f(x),
        None if bound > 0.0 => o_prime / bound,
        None => f64::INFINITY,
    };
    let unit_discriminant_clause = (gamma.disc_valuation == 0).then(|| count.value <= volume);
    Ok(VerificationRecord { o_prime, bound, weight, volume, ratio_exact, ratio, unit_discriminant_clause })
}

/// Local datum and parity variant of every type realizable by an integral
/// trace with `nu <= max_twice_nu / 2`, as used by the oracle grid.
pub fn realizable_types(p: u64, max_twice_nu: u32) -> Vec<(SplittingType, HalfInt)> {
    let mut out = Vec::new();
    for twice in 0..=max_twice_nu {
        for kind in [
            SplittingType::Split,
            SplittingType::EllipticUnramified,
            SplittingType::EllipticRamifiedTame,
            SplittingType::EllipticRamifiedWild,
        ] {
            let nu = HalfInt::from_twice(twice);
            if GammaLocal::from_type(p, kind, nu).is_ok() && realize::find_trace(p, kind, nu).is_some() {
                out.push((kind, nu));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn local(q: u64, kind: SplittingType, twice: u32) -> GammaLocal {
        GammaLocal::from_type(q, kind, HalfInt::from_twice(twice)).unwrap()
    }

    #[test]
    fn descriptor_examples() {
        assert_eq!(fixed_set(&local(3, SplittingType::Split, 4)), FixedSetDescriptor::TubeApartment { nu: 2 });
        assert_eq!(
            fixed_set(&local(3, SplittingType::EllipticUnramified, 0)),
            FixedSetDescriptor::BallVertex { nu: 0, center: Parity::Even }
        );
        assert_eq!(
            fixed_set(&local(3, SplittingType::EllipticRamifiedTame, 1)),
            FixedSetDescriptor::BallEdge { radius: 0, exact: true }
        );
    }

    #[test]
    fn split_nu_one_over_q2() {
        let o = orbital_integral_nonarch(2, &local(2, SplittingType::Split, 2), 0, SubgroupKind::K0).unwrap();
        assert_eq!(o.count.count, 2);
        assert_eq!(o.count.value, Ratio::from_integer(2));
        assert_eq!(o.verification.o_prime, 1.0);
        assert_eq!(o.verification.weight, 1);
        assert_eq!(o.verification.ratio_exact, Some(Ratio::from_integer(1)));
    }

    #[test]
    fn unramified_unit_discriminant_vanishes_at_positive_level() {
        let o = orbital_integral_nonarch(3, &local(3, SplittingType::EllipticUnramified, 0), 2, SubgroupKind::K1).unwrap();
        assert_eq!(o.count.value, Ratio::from_integer(0));
        assert_eq!(o.verification.unit_discriminant_clause, Some(true));
    }

    #[test]
    fn split_unit_discriminant_is_twice_the_volume() {
        // Both vertices of the standard apartment's fundamental domain carry
        // an even-type path, so O = 2 vol(K0(p^r)) for r >= 1.
        let o = orbital_integral_nonarch(3, &local(3, SplittingType::Split, 0), 2, SubgroupKind::K0).unwrap();
        assert_eq!(o.count.value, Ratio::new(1, 6));
        assert_eq!(o.verification.unit_discriminant_clause, Some(false));
        let o = orbital_integral_nonarch(3, &local(3, SplittingType::Split, 0), 0, SubgroupKind::K0).unwrap();
        assert_eq!(o.count.value, Ratio::from_integer(1));
    }
}
