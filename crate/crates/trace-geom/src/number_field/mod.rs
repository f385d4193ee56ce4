//! Number fields of degree at most 4 given by a monic polynomial and an
//! integral basis: validation, discriminants, prime splitting, Dedekind zeta
//! enclosures at 2, Minkowski embeddings and lattice points in polycylinders.

mod enumerate;
mod ideal;
pub mod poly;
mod zeta;

pub use enumerate::{enumerate_polycylinder, exact_inside, Enumeration, Polycylinder, ENUMERATION_BUDGET};
pub use ideal::{ideals_up_to_norm, split_prime, Ideal, PrimeIdealData};
pub use zeta::{dedekind_zeta2, prime_tail_sum};

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use poly::{bareiss_det, discriminant, factor_mod_p, FpPoly};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Q = Ratio<i128>;

pub const MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("polynomial must be monic with integer coefficients")]
    NotMonic,
    #[error("degree {0} is outside 1..=4")]
    UnsupportedDegree(usize),
    #[error("polynomial is reducible over Q")]
    ReduciblePolynomial,
    #[error("basis matrix is not square of full rank")]
    SingularBasis,
    #[error("basis does not span a ring containing 1")]
    BasisNotARing,
    #[error("claimed discriminant {claimed} but computed {computed}")]
    DiscriminantMismatch { claimed: i128, computed: i128 },
    #[error("power basis is not maximal at p = {p}; supply an integral basis")]
    NonMaximalPowerBasis { p: u64 },
    #[error("p = {p} divides the index of Z[theta]; splitting is unsupported there")]
    IndexDivisorUnsupported { p: u64 },
    #[error("enumeration box has {points} points, budget is {budget}")]
    OverflowGuard { points: u128, budget: u128 },
    #[error("invalid field description: {0}")]
    Invalid(String),
}

/// A rational matrix entry in a field document: an integer or `"a/b"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalEntry {
    Int(i64),
    Text(String),
}

impl RationalEntry {
    pub fn to_rational(&self) -> Result<Q, FieldError> {
        match self {
            Self::Int(n) => Ok(Q::from_integer(*n as i128)),
            Self::Text(s) => {
                let bad = || FieldError::Invalid(format!("bad rational entry {s:?}"));
                match s.split_once('/') {
                    Some((a, b)) => {
                        let (a, b): (i128, i128) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                        if b == 0 {
                            return Err(bad());
                        }
                        Ok(Q::new(a, b))
                    }
                    None => Ok(Q::from_integer(s.trim().parse().map_err(|_| bad())?)),
                }
            }
        }
    }
}

/// A field as written in a TOML or JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldInput {
    /// Coefficients `c0, ..., 1`.
    pub poly: Vec<i128>,
    #[serde(default)]
    pub basis: Option<Vec<Vec<RationalEntry>>>,
    #[serde(default)]
    pub disc: Option<i128>,
}

impl FieldInput {
    pub fn build(&self) -> Result<NumberFieldSpec, FieldError> {
        let basis = match &self.basis {
            None => None,
            Some(rows) => Some(
                rows.iter()
                    .map(|r| r.iter().map(RationalEntry::to_rational).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        parse_field(&self.poly, basis, self.disc)
    }
}

/// A field element by its coordinates in the integral basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(pub Vec<i128>);

/// A validated number field with its integral basis.
#[derive(Debug, Clone, Serialize)]
pub struct NumberFieldSpec {
    /// Defining polynomial, coefficients low to high.
    pub poly: Vec<i128>,
    /// Row `i` expresses `omega_i` in the power basis.
    pub basis: Vec<Vec<Q>>,
    #[serde(skip)]
    basis_inv: Vec<Vec<Q>>,
    /// `omega_i omega_j = sum_k mult[i][j][k] omega_k`.
    #[serde(skip)]
    mult: Vec<Vec<Vec<i128>>>,
    /// Signed field discriminant.
    pub disc: i128,
    pub poly_disc: i128,
    /// `[O : Z[theta]]`.
    pub index: i128,
    pub real_places: usize,
    pub complex_places: usize,
    /// Roots at the archimedean places: real ones ascending, then one root
    /// of each conjugate pair (positive imaginary part).
    #[serde(skip)]
    pub roots: Vec<Complex64>,
    /// `omega_i` at each place.
    #[serde(skip)]
    omega_at: Vec<Vec<Complex64>>,
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut c = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    c
}

/// Product of two power-basis vectors reduced modulo the monic `f`.
fn mul_mod_poly(a: &[Q], b: &[Q], f: &[i128]) -> Vec<Q> {
    let d = f.len() - 1;
    let mut c = vec![Q::zero(); 2 * d - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    for k in (d..c.len()).rev() {
        let lead = c[k];
        if lead.is_zero() {
            continue;
        }
        for (i, &fi) in f.iter().enumerate().take(d) {
            c[k - d + i] -= lead * Q::from_integer(fi);
        }
        c[k] = Q::zero();
    }
    c.truncate(d);
    c
}

/// Inverse of a rational matrix by Gauss–Jordan elimination.
fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Whether a monic integer polynomial of degree <= 4 is irreducible over Q.
pub fn is_irreducible(f: &[i128]) -> bool {
    let d = f.len() - 1;
    if d == 1 {
        return true;
    }
    let c0 = f[0];
    if c0 == 0 {
        return false;
    }
    let divisors: Vec<i128> = {
        let n = c0.abs();
        let mut v = Vec::new();
        let mut k = 1;
        while k * k <= n {
            if n % k == 0 {
                v.extend([k, -k, n / k, -(n / k)]);
            }
            k += 1;
        }
        v
    };
    let eval = |x: i128| f.iter().rev().fold(0i128, |acc, &c| acc * x + c);
    if divisors.iter().any(|&r| eval(r) == 0) {
        return false;
    }
    if d <= 3 {
        return true;
    }
    // (x^2 + a x + b)(x^2 + c x + e) with b e = c0.
    let (c1, c2, c3) = (f[1], f[2], f[3]);
    for &b in &divisors {
        let e = c0 / b;
        // a + c = c3, a c = c2 - b - e.
        let disc = c3 * c3 - 4 * (c2 - b - e);
        if disc < 0 {
            continue;
        }
        let s = (disc as f64).sqrt().round() as i128;
        for s in [s - 1, s, s + 1] {
            if s >= 0 && s * s == disc && (c3 + s) % 2 == 0 {
                let a = (c3 + s) / 2;
                let c = c3 - a;
                if a * e + b * c == c1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Roots of a monic polynomial by Aberth iteration with a Newton polish.
fn complex_roots(f: &[i128]) -> Vec<Complex64> {
    let d = f.len() - 1;
    let fc: Vec<Complex64> = f.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for c in fc.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    if d == 1 {
        return vec![Complex64::new(-f[0] as f64, 0.0)];
    }
    let radius = 1.0 + f[..d].iter().map(|c| c.abs() as f64).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    z
}

/// Validate a field. Without a basis the power basis is used and must be
/// maximal (checked by Dedekind's criterion at every `p` with `p^2 | disc`).
pub fn parse_field(poly: &[i128], basis: Option<Vec<Vec<Q>>>, claimed_disc: Option<i128>) -> Result<NumberFieldSpec, FieldError> {
    if poly.len() < 2 || *poly.last().unwrap() != 1 {
        return Err(FieldError::NotMonic);
    }
    let d = poly.len() - 1;
    if d > MAX_DEGREE {
        return Err(FieldError::UnsupportedDegree(d));
    }
    if !is_irreducible(poly) {
        return Err(FieldError::ReduciblePolynomial);
    }
    let power_basis = basis.is_none();
    let basis = basis.unwrap_or_else(|| {
        (0..d).map(|i| (0..d).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
    });
    if basis.len() != d || basis.iter().any(|r| r.len() != d) {
        return Err(FieldError::SingularBasis);
    }
    let basis_inv = invert(&basis).ok_or(FieldError::SingularBasis)?;
    let to_omega = |v: &[Q]| -> Vec<Q> {
        (0..d).map(|k| (0..d).map(|j| v[j] * basis_inv[j][k]).sum()).collect()
    };
    let integral = |v: &[Q]| -> Option<Vec<i128>> { v.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect() };
    // 1 must lie in the lattice.
    let mut one = vec![Q::zero(); d];
    one[0] = Q::one();
    integral(&to_omega(&one)).ok_or(FieldError::BasisNotARing)?;
    let mut mult = vec![vec![vec![0i128; d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            let prod = mul_mod_poly(&basis[i], &basis[j], poly);
            mult[i][j] = integral(&to_omega(&prod)).ok_or(FieldError::BasisNotARing)?;
        }
    }
    let trace_of = |k: usize| -> i128 { (0..d).map(|i| mult[k][i][i]).sum() };
    let traces: Vec<i128> = (0..d).map(trace_of).collect();
    let form: Vec<Vec<i128>> = (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| mult[i][j][k] * traces[k]).sum()).collect())
        .collect();
    let disc = bareiss_det(form);
    let poly_disc = discriminant(poly);
    let ratio = poly_disc / disc;
    let index = (ratio as f64).sqrt().round() as i128;
    if disc == 0 || poly_disc % disc != 0 || index * index != ratio {
        return Err(FieldError::BasisNotARing);
    }
    if let Some(claimed) = claimed_disc {
        if claimed.abs() != disc.abs() {
            return Err(FieldError::DiscriminantMismatch { claimed, computed: disc });
        }
    }
    if power_basis && claimed_disc.is_none() {
        for (p, e) in crate::arith::factor(poly_disc.unsigned_abs()) {
            if e >= 2 && !dedekind_maximal(poly, p as u64) {
                return Err(FieldError::NonMaximalPowerBasis { p: p as u64 });
            }
        }
    }
    let roots = complex_roots(poly);
    let mut real: Vec<f64> = Vec::new();
    let mut cplx: Vec<Complex64> = Vec::new();
    for z in &roots {
        if z.im.abs() <= 1e-9 * (1.0 + z.norm()) {
            real.push(z.re);
        } else if z.im > 0.0 {
            cplx.push(*z);
        }
    }
    if real.len() + 2 * cplx.len() != d {
        return Err(FieldError::Invalid("root isolation failed".into()));
    }
    // sign(disc) = (-1)^{r2}.
    if (disc < 0) != (cplx.len() % 2 == 1) {
        return Err(FieldError::Invalid("signature disagrees with the discriminant sign".into()));
    }
    real.sort_by(f64::total_cmp);
    cplx.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let places: Vec<Complex64> = real.iter().map(|&x| Complex64::new(x, 0.0)).chain(cplx.iter().copied()).collect();
    let omega_at = places
        .iter()
        .map(|&z| {
            basis
                .iter()
                .map(|row| {
                    row.iter().enumerate().fold(Complex64::zero(), |acc, (j, c)| {
                        acc + z.powu(j as u32) * (*c.numer() as f64 / *c.denom() as f64)
                    })
                })
                .collect()
        })
        .collect();
    Ok(NumberFieldSpec {
        poly: poly.to_vec(),
        basis,
        basis_inv,
        mult,
        disc,
        poly_disc,
        index,
        real_places: real.len(),
        complex_places: cplx.len(),
        roots: places,
        omega_at,
    })
}

/// Dedekind's criterion: whether `Z[theta]` is maximal at `p`.
fn dedekind_maximal(f: &[i128], p: u64) -> bool {
    let factors = factor_mod_p(f, p);
    let lift = |g: &FpPoly| -> Vec<i128> { g.coeffs.iter().map(|&c| c as i128).collect() };
    let mut g = vec![1i128];
    let mut h = vec![1i128];
    for (gi, e) in &factors {
        g = poly_mul(&g, &lift(gi));
        for _ in 1..*e {
            h = poly_mul(&h, &lift(gi));
        }
    }
    let gh = poly_mul(&g, &h);
    let n = f.len().max(gh.len());
    let diff: Vec<i128> = (0..n).map(|i| f.get(i).unwrap_or(&0) - gh.get(i).unwrap_or(&0)).collect();
    let big_f: Vec<i128> = diff.iter().map(|&c| c / p as i128).collect();
    let fp = |v: &[i128]| FpPoly::from_int(p, v);
    let common = fp(&big_f).gcd(&fp(&g)).gcd(&fp(&h));
    common.degree() == 0 && !common.is_zero() || fp(&big_f).is_zero() && fp(&g).gcd(&fp(&h)).degree() == 0
}

impl NumberFieldSpec {
    pub fn rationals() -> Self {
        parse_field(&[0, 1], None, None).expect("Q is a field")
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn disc_abs(&self) -> u128 {
        self.disc.unsigned_abs()
    }

    /// Archimedean places: real ones first.
    pub fn places(&self) -> usize {
        self.real_places + self.complex_places
    }

    pub fn is_complex_place(&self, v: usize) -> bool {
        v >= self.real_places
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i128) -> FieldElement {
        let d = self.degree();
        let mut v = vec![Q::zero(); d];
        v[0] = Q::from_integer(n);
        let c = (0..d).map(|k| (0..d).map(|j| v[j] * self.basis_inv[j][k]).sum::<Q>().to_integer()).collect();
        FieldElement(c)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let d = self.degree();
        let mut c = vec![0i128; d];
        for i in 0..d {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..d {
                if b.0[j] == 0 {
                    continue;
                }
                for (k, ck) in c.iter_mut().enumerate() {
                    *ck += a.0[i] * b.0[j] * self.mult[i][j][k];
                }
            }
        }
        FieldElement(c)
    }

    /// Matrix of multiplication by `a`: column `j` holds `a omega_j`.
    fn mult_matrix(&self, a: &FieldElement) -> Vec<Vec<i128>> {
        let d = self.degree();
        let mut m = vec![vec![0i128; d]; d];
        for j in 0..d {
            let mut e = vec![0i128; d];
            e[j] = 1;
            let prod = self.mul(a, &FieldElement(e));
            for k in 0..d {
                m[k][j] = prod.0[k];
            }
        }
        m
    }

    pub fn norm(&self, a: &FieldElement) -> i128 {
        bareiss_det(self.mult_matrix(a))
    }

    pub fn trace(&self, a: &FieldElement) -> i128 {
        let m = self.mult_matrix(a);
        (0..self.degree()).map(|i| m[i][i]).sum()
    }

    /// Coordinates in the power basis.
    pub fn power_coords(&self, a: &FieldElement) -> Vec<Q> {
        let d = self.degree();
        (0..d).map(|j| (0..d).map(|i| Q::from_integer(a.0[i]) * self.basis[i][j]).sum()).collect()
    }

    /// Images at the archimedean places.
    pub fn embed(&self, a: &FieldElement) -> Vec<Complex64> {
        self.omega_at
            .iter()
            .map(|row| row.iter().zip(&a.0).map(|(w, &c)| w * c as f64).sum())
            .collect()
    }

    /// `|a|_v`: absolute value at real places, squared modulus at complex ones.
    pub fn abs_at(&self, v: usize, z: Complex64) -> f64 {
        if self.is_complex_place(v) {
            z.norm_sqr()
        } else {
            z.re.abs()
        }
    }

    /// The real Minkowski matrix: row per real coordinate (real places,
    /// then `Re`, `Im` of each complex place), column per basis element.
    pub fn minkowski_matrix(&self) -> Vec<Vec<f64>> {
        let mut rows = Vec::new();
        for (v, row) in self.omega_at.iter().enumerate() {
            if self.is_complex_place(v) {
                rows.push(row.iter().map(|z| z.re).collect());
                rows.push(row.iter().map(|z| z.im).collect());
            } else {
                rows.push(row.iter().map(|z| z.re).collect());
            }
        }
        rows
    }

    /// Covolume of the ring of integers with measure `dx` at real places and
    /// `2 dx dy` at complex places; equals `|disc|^{1/2}`.
    pub fn covolume(&self) -> f64 {
        let m = self.minkowski_matrix();
        det_f64(m).abs() * 2f64.powi(self.complex_places as i32)
    }

    /// The field as a small TOML-ready description.
    pub fn input(&self) -> FieldInput {
        let identity = self.basis.iter().enumerate().all(|(i, r)| {
            r.iter().enumerate().all(|(j, x)| *x == if i == j { Q::one() } else { Q::zero() })
        });
        let basis = (!identity).then(|| {
            self.basis
                .iter()
                .map(|r| r.iter().map(|x| RationalEntry::Text(x.to_string())).collect())
                .collect()
        });
        FieldInput { poly: self.poly.clone(), basis, disc: Some(self.disc.abs()) }
    }
}

/// Determinant of a small real matrix with partial pivoting.
pub fn det_f64(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    det
}

/// Inverse of a small real matrix.
pub fn invert_f64(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[piv][c] == 0.0 {
            return None;
        }
        a.swap(piv, c);
        let inv = 1.0 / a[c][c];
        for x in a[c].iter_mut() {
            *x *= inv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                if f != 0.0 {
                    let pivot_row = a[c].clone();
                    for (x, y) in a[r].iter_mut().zip(pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Fields used by the tests, the acceptance suite and the CLI presets.
pub fn catalog_field(name: &str) -> Option<NumberFieldSpec> {
    let poly: &[i128] = match name {
        "Q" | "rationals" => &[0, 1],
        "Q(i)" | "gaussian" => &[1, 0, 1],
        "Q(sqrt5)" | "Q(sqrt(5))" | "golden" => &[-1, -1, 1],
        "Q(zeta5)" | "cyclotomic5" => &[1, 1, 1, 1, 1],
        _ => return None,
    };
    parse_field(poly, None, None).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let q = parse_field(&[0, 1], None, None).unwrap();
        assert_eq!((q.degree(), q.disc, q.real_places, q.complex_places), (1, 1, 1, 0));
        let gi = parse_field(&[1, 0, 1], None, None).unwrap();
        assert_eq!((gi.disc, gi.real_places, gi.complex_places), (-4, 0, 1));
        let g5 = parse_field(&[-1, -1, 1], None, None).unwrap();
        assert_eq!((g5.disc, g5.real_places), (5, 2));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_field(&[-1, 0, 1], None, None).unwrap_err(), FieldError::ReduciblePolynomial);
        assert_eq!(parse_field(&[4, 0, 0, 0, 1], None, None).unwrap_err(), FieldError::ReduciblePolynomial);
        assert_eq!(parse_field(&[1, 0, 0, 0, 0, 1], None, None).unwrap_err(), FieldError::UnsupportedDegree(5));
        // x^2 + 3 has disc -12 while Z[(1+sqrt(-3))/2] has disc -3.
        assert_eq!(parse_field(&[3, 0, 1], None, None).unwrap_err(), FieldError::NonMaximalPowerBasis { p: 2 });
        assert!(matches!(
            parse_field(&[1, 0, 1], None, Some(8)).unwrap_err(),
            FieldError::DiscriminantMismatch { .. }
        ));
        let half = |a, b| Q::new(a, b);
        // {1, sqrt(-3)/2} is not a ring.
        let bad = vec![vec![Q::one(), Q::zero()], vec![Q::zero(), half(1, 2)]];
        assert_eq!(parse_field(&[3, 0, 1], Some(bad), None).unwrap_err(), FieldError::BasisNotARing);
    }

    #[test]
    fn user_basis_for_eisenstein_integers() {
        let b = vec![vec![Q::one(), Q::zero()], vec![Q::new(1, 2), Q::new(1, 2)]];
        let k = parse_field(&[3, 0, 1], Some(b), Some(3)).unwrap();
        assert_eq!(k.disc, -3);
        assert_eq!(k.index, 2);
    }

    #[test]
    fn quartic_irreducibility() {
        assert!(is_irreducible(&[1, 0, 0, 0, 1]));
        assert!(!is_irreducible(&[1, 0, -3, 0, 1])); // (x^2 - x - 1)(x^2 + x - 1)
        assert!(is_irreducible(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn covolume_is_root_discriminant() {
        for name in ["Q", "Q(i)", "Q(sqrt5)", "Q(zeta5)"] {
            let k = catalog_field(name).unwrap();
            let want = (k.disc_abs() as f64).sqrt();
            assert!((k.covolume() - want).abs() < 1e-9 * want, "{name}");
        }
        let b = vec![vec![Q::one(), Q::zero()], vec![Q::new(1, 2), Q::new(1, 2)]];
        let k = parse_field(&[3, 0, 1], Some(b), Some(3)).unwrap();
        assert!((k.covolume() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn norms_and_traces() {
        let k = catalog_field("Q(i)").unwrap();
        let a = FieldElement(vec![3, 2]);
        assert_eq!(k.norm(&a), 13);
        assert_eq!(k.trace(&a), 6);
        let z = catalog_field("Q(zeta5)").unwrap();
        assert_eq!(z.norm(&FieldElement(vec![1, -1, 0, 0])), 5);
    }
}
