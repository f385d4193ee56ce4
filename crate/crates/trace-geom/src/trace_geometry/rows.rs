//! Per-trace rows of the regular term.

use super::centralizer::{centralizer_bound, disc_data, CentralizerBound, DiscData, FieldContext};
use super::{BoundOptions, GeomError, QuaternionSetting};
use crate::arith::{checked_pow, inv_mod, mul_mod, rem};
use crate::number_field::{FieldElement, NumberFieldSpec, PrimeIdealData, Q};
use crate::padic_local::{integral_precision, weight_w, SubgroupKind, TraceResidue, WeightArg};
use crate::Interval;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Reduction `O -> Z/p^M` at a level prime of degree one.
#[derive(Debug, Clone)]
pub struct LevelResidue {
    pub p: u64,
    pub r: u32,
    pub kind: SubgroupKind,
    precision: u32,
    modulus: u64,
    /// Image of `theta` in `Z/p^M`; unused over `Q`.
    root: u64,
}

impl LevelResidue {
    pub fn new(field: &NumberFieldSpec, pr: &PrimeIdealData, r: u32, kind: SubgroupKind) -> Result<Self, GeomError> {
        let p = pr.p;
        // Enough digits to decide every threshold `weight_w` asks about.
        let precision = integral_precision(p, r) + 1;
        let modulus = checked_pow(p, precision)
            .filter(|&m| m < 1 << 62)
            .ok_or_else(|| GeomError::InvalidSetting(format!("level prime {p}^{r} is too large")))?;
        let root = if field.degree() == 1 {
            0
        } else {
            let mut theta = vec![Q::from_integer(0); field.degree()];
            theta[1] = Q::one();
            let theta = field.from_power_coords(&theta).expect("theta is integral");
            let a0 = (0..p)
                .find(|&a| pr.ideal.contains(&field.sub(&theta, &field.from_int(a as i128))))
                .ok_or_else(|| GeomError::InvalidSetting(format!("level prime above {p} is not of degree one")))?;
            hensel_root(&field.poly, a0, p, modulus)
        };
        Ok(Self { p, r, kind, precision, modulus, root })
    }

    fn residue(&self, field: &NumberFieldSpec, x: &FieldElement) -> TraceResidue {
        if field.degree() == 1 {
            return TraceResidue::exact(x.0[0]);
        }
        let m = self.modulus;
        let mut acc = 0u64;
        let mut power = 1u64;
        for c in field.power_coords(x) {
            let den = inv_mod(rem(*c.denom(), m), m).expect("denominator prime to p");
            let term = mul_mod(rem(*c.numer(), m), den, m);
            acc = (acc + mul_mod(term, power, m)) % m;
            power = mul_mod(power, self.root, m);
        }
        TraceResidue::modulo(acc as i128, self.precision)
    }

    pub fn weight(&self, field: &NumberFieldSpec, x: &FieldElement) -> Result<u64, GeomError> {
        Ok(weight_w(self.p, self.p, self.r, self.kind, WeightArg::Trace(self.residue(field, x)))?)
    }
}

/// Lift a simple root of `f mod p` to `Z/m` with `m` a power of `p`.
fn hensel_root(f: &[i128], a0: u64, p: u64, m: u64) -> u64 {
    let eval = |coeffs: &[i128], a: u64| -> u64 {
        coeffs.iter().rev().fold(0u64, |acc, &c| (mul_mod(acc, a, m) + rem(c, m)) % m)
    };
    let deriv: Vec<i128> = f.iter().enumerate().skip(1).map(|(i, &c)| i as i128 * c).collect();
    let mut a = a0;
    let mut pk = p;
    while pk < m {
        pk = pk.saturating_mul(pk).min(m);
        let fa = eval(f, a);
        let inv = inv_mod(eval(&deriv, a), m).expect("unramified prime gives a simple root");
        a = (a + m - mul_mod(fa, inv, m)) % m;
    }
    a
}

/// The four radicands of the self-normalizing identity; the factors are
/// their square roots, the first one also carrying `e^R`:
/// `[e^R / sqrt(Delta_k)] [sqrt(Delta_k N_rel)] [1 / sqrt(N Delta)] [sqrt(N Delta / N_rel)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationFactors {
    pub radicands: [Ratio<u128>; 4],
}

impl NormalizationFactors {
    fn new(disc_k: u128, rel: u128, disc_norm: u128) -> Self {
        Self {
            radicands: [
                Ratio::new(1, disc_k),
                Ratio::from_integer(disc_k * rel),
                Ratio::new(1, disc_norm),
                Ratio::new(disc_norm, rel),
            ],
        }
    }

    /// Product of the radicands in exact arithmetic.
    pub fn radicand_product(&self) -> BigRational {
        self.radicands.iter().fold(BigRational::one(), |acc, r| {
            acc * BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
        })
    }

    /// The four factors as intervals.
    pub fn factors(&self, e_r: Interval) -> [Interval; 4] {
        let root = |r: &Ratio<u128>| (Interval::point(*r.numer() as f64) / Interval::point(*r.denom() as f64)).sqrt();
        [e_r * root(&self.radicands[0]), root(&self.radicands[1]), root(&self.radicands[2]), root(&self.radicands[3])]
    }

    /// Whether the product is `e^R`: exactly for the radicands, and as an
    /// interval containment for the factors.
    pub fn telescopes(&self, e_r: Interval) -> bool {
        let prod = self.factors(e_r).into_iter().fold(Interval::point(1.0), |a, b| a * b);
        self.radicand_product().is_one() && prod.contains_interval(&e_r)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowFlags {
    pub omega_coarse: bool,
    pub disc_coarse: bool,
    pub l_elementary: bool,
    pub l_nonrigorous: bool,
}

/// One trace `x` of the regular term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub trace: FieldElement,
    pub disc_norm: u128,
    pub omega: u32,
    pub class_count: u128,
    pub rel_disc_norm: u128,
    pub centralizer: CentralizerBound,
    pub weight: u64,
    /// `C_abs^{d + omega} |N Delta_{l/k}|^{-1/2} w(x)`.
    pub orbital: Interval,
    /// Class count times centralizer times orbital.
    pub arithmetic: Interval,
    /// Product of the archimedean factors, set when the row is assembled.
    pub arch: f64,
    pub total: Interval,
    pub normalization: NormalizationFactors,
    pub flags: RowFlags,
}

/// Everything that is fixed while traces vary.
#[derive(Debug, Clone)]
pub struct RowContext {
    pub field: FieldContext,
    class_exponent: u32,
    level: Vec<LevelResidue>,
    options: BoundOptions,
}

impl RowContext {
    pub fn new(setting: &QuaternionSetting, options: &BoundOptions) -> Result<Self, GeomError> {
        let level = setting
            .level
            .iter()
            .map(|l| LevelResidue::new(&setting.field, &l.prime, l.r, l.kind))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            field: FieldContext::new(&setting.field, options),
            class_exponent: (setting.signature.a + setting.ram_f.len()) as u32,
            level,
            options: options.clone(),
        })
    }

    /// `w_kappa^n(x)`, the product of the local weights.
    pub fn weight(&self, x: &FieldElement) -> Result<u64, GeomError> {
        self.level.iter().try_fold(1u64, |acc, l| Ok(acc * l.weight(&self.field.field, x)?))
    }

    pub fn per_class_bound(&self, x: &FieldElement) -> Result<LedgerRow, GeomError> {
        let field = &self.field.field;
        let dd: DiscData = disc_data(&self.field, x, &self.options)?;
        let cb = centralizer_bound(&self.field, &dd, &self.options);
        let weight = self.weight(x)?;
        let class_count = 1u128 << (self.class_exponent + dd.omega).min(127);
        let d = field.degree() as u32;
        let orbital = Interval::point(self.options.c_abs).powi(d + dd.omega)
            * Interval::point(dd.rel_disc_norm as f64).sqrt().recip()
            * Interval::point(weight as f64);
        let arithmetic = Interval::point(class_count as f64) * cb.bound * orbital;
        Ok(LedgerRow {
            trace: x.clone(),
            disc_norm: dd.disc_norm,
            omega: dd.omega,
            class_count,
            rel_disc_norm: dd.rel_disc_norm,
            centralizer: cb,
            weight,
            orbital,
            arithmetic,
            arch: 1.0,
            total: arithmetic,
            normalization: NormalizationFactors::new(field.disc_abs(), dd.rel_disc_norm, dd.disc_norm),
            flags: RowFlags {
                omega_coarse: dd.omega_coarse,
                disc_coarse: dd.rel_coarse,
                l_elementary: cb.l_value.method == super::lvalue::LMethod::Elementary,
                l_nonrigorous: !cb.l_value.method.is_rigorous(),
            },
        })
    }
}

/// The ledger as CSV, one row per trace.
pub fn ledger_csv(rows: &[LedgerRow], e_r: Interval) -> String {
    let mut out = String::from(
        "trace,disc_norm,omega,class_count,rel_disc_norm,l_lo,l_hi,l_method,centralizer_hi,weight,orbital_hi,arch,total_hi,\
         radicand1,radicand2,radicand3,radicand4,telescopes,flags\n",
    );
    for row in rows {
        let trace = row.trace.0.iter().map(i128::to_string).collect::<Vec<_>>().join(" ");
        let rad = |i: usize| format!("{}/{}", row.normalization.radicands[i].numer(), row.normalization.radicands[i].denom());
        let mut flags = Vec::new();
        for (set, name) in [
            (row.flags.omega_coarse, "omega_coarse"),
            (row.flags.disc_coarse, "disc_coarse"),
            (row.flags.l_elementary, "l_elementary"),
            (row.flags.l_nonrigorous, "l_nonrigorous"),
        ] {
            if set {
                flags.push(name);
            }
        }
        let method = serde_json::to_value(row.centralizer.l_value.method).expect("serializable");
        let _ = writeln!(
            out,
            "{trace},{},{},{},{},{:e},{:e},{},{:e},{},{:e},{:e},{:e},{},{},{},{},{},{}",
            row.disc_norm,
            row.omega,
            row.class_count,
            row.rel_disc_norm,
            row.centralizer.l_value.value.lo,
            row.centralizer.l_value.value.hi,
            method.as_str().unwrap_or_default(),
            row.centralizer.bound.hi,
            row.weight,
            row.orbital.hi,
            row.arch,
            row.total.hi,
            rad(0),
            rad(1),
            rad(2),
            rad(3),
            row.normalization.telescopes(e_r),
            flags.join("|"),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_field::{catalog_field, split_prime};

    #[test]
    fn hensel_lift_solves_the_polynomial() {
        // x^2 + 1 has roots 2, 3 mod 5; lift to 5^6.
        let m = 5u64.pow(6);
        for a0 in [2, 3] {
            let a = hensel_root(&[1, 0, 1], a0, 5, m);
            assert_eq!((a * a + 1) % m, 0);
            assert_eq!(a % 5, a0);
        }
    }

    #[test]
    fn residues_respect_the_prime() {
        let k = catalog_field("Q(i)").unwrap();
        for pr in split_prime(&k, 5).unwrap() {
            let lr = LevelResidue::new(&k, &pr, 1, SubgroupKind::K0).unwrap();
            for x in [FieldElement(vec![3, 1]), FieldElement(vec![-7, 4]), pr.generator.clone()] {
                let res = lr.residue(&k, &x);
                let in_prime = pr.ideal.contains(&x);
                assert_eq!(res.value % 5 == 0, in_prime, "{x:?}");
            }
        }
    }

    #[test]
    fn normalization_is_exact() {
        let nf = NormalizationFactors::new(5, 20, 80);
        assert!(nf.radicand_product().is_one());
        let e_r = Interval::point(7.3).exp();
        assert!(nf.telescopes(e_r));
    }
}
