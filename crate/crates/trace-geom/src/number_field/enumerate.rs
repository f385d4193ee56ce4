//! Lattice points of `O` (or of a coset `y + m`) inside a polycylinder.

use super::{invert_f64, FieldElement, FieldError, Ideal, NumberFieldSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt::Write;

/// Default cap on the number of integer-box points visited.
pub const ENUMERATION_BUDGET: u128 = 50_000_000;

/// Closed polycylinder `{x : |x|_v <= P_v}` where `|.|_v` is the absolute
/// value at real places and the squared modulus at complex places.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polycylinder {
    pub radii: Vec<f64>,
}

impl Polycylinder {
    pub fn new(field: &NumberFieldSpec, radii: Vec<f64>) -> Result<Self, FieldError> {
        if radii.len() != field.places() {
            return Err(FieldError::Invalid(format!("need {} radii, got {}", field.places(), radii.len())));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(FieldError::Invalid("radii must be positive and finite".into()));
        }
        Ok(Self { radii })
    }

    /// Volume with `dx` at real places and `2 dx dy` at complex places, the
    /// normalization under which `covol(O) = |disc|^{1/2}`.
    pub fn volume(&self, field: &NumberFieldSpec) -> f64 {
        self.radii
            .iter()
            .enumerate()
            .map(|(v, &p)| if field.is_complex_place(v) { 2.0 * std::f64::consts::PI * p } else { 2.0 * p })
            .product()
    }

    /// `|disc|^{1/2} + vol / (|disc|^{1/2} N(m))`, the shape of the
    /// lattice-point bound for cosets of `m`.
    pub fn count_scale(&self, field: &NumberFieldSpec, ideal_norm: u128) -> f64 {
        let root = (field.disc_abs() as f64).sqrt();
        root + self.volume(field) / (root * ideal_norm as f64)
    }
}

/// Points found, in lexicographic coordinate order.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Enumeration {
    pub points: Vec<FieldElement>,
    /// Points whose membership floating point could not settle and no exact
    /// test was available (degree above 2 on the boundary).
    pub ambiguous: Vec<FieldElement>,
    pub box_points: u128,
}

impl Enumeration {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// CSV with one row per point: the coordinate vector (space separated)
    /// and then the embeddings, one column per real place and `re`, `im`
    /// for each complex place.
    pub fn to_csv(&self, field: &NumberFieldSpec) -> String {
        let mut out = String::from("coords");
        for v in 0..field.places() {
            if field.is_complex_place(v) {
                write!(out, ",re_{v},im_{v}").unwrap();
            } else {
                write!(out, ",emb_{v}").unwrap();
            }
        }
        out.push('\n');
        for x in &self.points {
            let coords: Vec<String> = x.0.iter().map(|c| c.to_string()).collect();
            out.push_str(&coords.join(" "));
            for (v, z) in field.embed(x).into_iter().enumerate() {
                if field.is_complex_place(v) {
                    write!(out, ",{:.12e},{:.12e}", z.re, z.im).unwrap();
                } else {
                    write!(out, ",{:.12e}", z.re).unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

enum Membership {
    Inside,
    Outside,
    Unknown,
}

fn big(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite radius")
}

/// Sign of `u + v sqrt(d)` for rationals `u, v` and `d > 0`.
fn surd_sign(u: &BigRational, v: &BigRational, d: &BigRational) -> Ordering {
    let su = u.cmp(&BigRational::zero());
    let sv = v.cmp(&BigRational::zero());
    if su != Ordering::Less && sv != Ordering::Less {
        return if su == Ordering::Equal && sv == Ordering::Equal { Ordering::Equal } else { Ordering::Greater };
    }
    if su != Ordering::Greater && sv != Ordering::Greater {
        return Ordering::Less;
    }
    // Opposite signs: compare u^2 with v^2 d.
    let cmp = (u * u).cmp(&(v * v * d));
    if su == Ordering::Greater {
        cmp
    } else {
        cmp.reverse()
    }
}

/// Exact membership test for degree at most 2; `None` above that.
pub fn exact_inside(field: &NumberFieldSpec, x: &FieldElement, cyl: &Polycylinder) -> Option<bool> {
    let d = field.degree();
    if d > 2 {
        return None;
    }
    let coords = field.power_coords(x);
    let to_big = |q: &super::Q| BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()));
    if d == 1 {
        let r = to_big(&coords[0]);
        return Some(r.abs() <= big(cyl.radii[0]));
    }
    let c1 = BigRational::from_integer(BigInt::from(field.poly[1]));
    let disc = BigRational::from_integer(BigInt::from(field.poly_disc));
    let two = BigRational::from_integer(BigInt::from(2));
    let (r0, r1) = (to_big(&coords[0]), to_big(&coords[1]));
    // theta = (-c1 +- sqrt(disc)) / 2, so x = a +- b sqrt(disc).
    let a = &r0 - &r1 * &c1 / &two;
    let b = &r1 / &two;
    if field.complex_places == 1 {
        let n = &a * &a - &b * &b * &disc;
        return Some(n <= big(cyl.radii[0]));
    }
    // The first real place is the smaller root, i.e. the minus sign.
    for (v, sign) in [(0usize, -1i32), (1, 1)] {
        let p = big(cyl.radii[v]);
        let bv = if sign < 0 { -b.clone() } else { b.clone() };
        // -P <= a + bv sqrt(d) <= P.
        if surd_sign(&(&p - &a), &(-bv.clone()), &disc) == Ordering::Less {
            return Some(false);
        }
        if surd_sign(&(&p + &a), &bv, &disc) == Ordering::Less {
            return Some(false);
        }
    }
    Some(true)
}

fn classify(field: &NumberFieldSpec, x: &FieldElement, cyl: &Polycylinder) -> Membership {
    let emb = field.embed(x);
    let mut unsure = false;
    for (v, z) in emb.iter().enumerate() {
        let scale: f64 = field.omega_at[v].iter().zip(&x.0).map(|(w, &c)| w.norm() * (c as f64).abs()).sum::<f64>() + 1.0;
        let val = field.abs_at(v, *z);
        let err = if field.is_complex_place(v) { 64.0 * f64::EPSILON * scale * scale } else { 64.0 * f64::EPSILON * scale };
        let p = cyl.radii[v];
        if val > p + err {
            return Membership::Outside;
        }
        if val >= p - err {
            unsure = true;
        }
    }
    if unsure {
        Membership::Unknown
    } else {
        Membership::Inside
    }
}

/// The points of `O` (or `y + m` when `coset` is given) in `cyl`, in
/// lexicographic order of integral-basis coordinates.
pub fn enumerate_polycylinder(
    field: &NumberFieldSpec,
    cyl: &Polycylinder,
    coset: Option<(&FieldElement, &Ideal)>,
    budget: u128,
) -> Result<Enumeration, FieldError> {
    let d = field.degree();
    if cyl.radii.len() != field.places() {
        return Err(FieldError::Invalid("polycylinder does not match the field's places".into()));
    }
    let ideal = match coset {
        Some((_, m)) => m.clone(),
        None => Ideal::unit(field),
    };
    let offset = coset.map(|(y, _)| y.clone()).unwrap_or_else(|| FieldElement(vec![0; d]));
    let phi = field.minkowski_matrix();
    // Columns: Minkowski images of the ideal's basis rows.
    let a: Vec<Vec<f64>> = (0..d)
        .map(|r| (0..d).map(|i| (0..d).map(|k| phi[r][k] * ideal.hnf[i][k] as f64).sum()).collect())
        .collect();
    let a_inv = invert_f64(&a).ok_or_else(|| FieldError::Invalid("degenerate lattice".into()))?;
    let my: Vec<f64> = (0..d).map(|r| (0..d).map(|k| phi[r][k] * offset.0[k] as f64).sum()).collect();
    let mut half = Vec::with_capacity(d);
    for (v, &p) in cyl.radii.iter().enumerate() {
        if field.is_complex_place(v) {
            half.push(p.sqrt());
            half.push(p.sqrt());
        } else {
            half.push(p);
        }
    }
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    let mut box_points: u128 = 1;
    for i in 0..d {
        let center = -(0..d).map(|r| a_inv[i][r] * my[r]).sum::<f64>();
        let width: f64 = (0..d).map(|r| a_inv[i][r].abs() * half[r]).sum();
        let slack = 1e-7 * (1.0 + width + center.abs());
        let (l, h) = ((center - width - slack).floor(), (center + width + slack).ceil());
        if !(l.is_finite() && h.is_finite()) || h - l > 1e15 {
            return Err(FieldError::OverflowGuard { points: u128::MAX, budget });
        }
        box_points = box_points.saturating_mul((h - l + 1.0) as u128);
        lo.push(l as i128);
        hi.push(h as i128);
    }
    if box_points > budget {
        return Err(FieldError::OverflowGuard { points: box_points, budget });
    }
    let mut out = Enumeration { box_points, ..Default::default() };
    let mut t = lo.clone();
    loop {
        let mut x = offset.0.clone();
        for i in 0..d {
            for k in 0..d {
                x[k] += t[i] * ideal.hnf[i][k];
            }
        }
        let x = FieldElement(x);
        match classify(field, &x, cyl) {
            Membership::Inside => out.points.push(x),
            Membership::Outside => {}
            Membership::Unknown => match exact_inside(field, &x, cyl) {
                Some(true) => out.points.push(x),
                Some(false) => {}
                None => out.ambiguous.push(x),
            },
        }
        // Odometer over the box.
        let mut i = d;
        loop {
            if i == 0 {
                out.points.sort();
                out.ambiguous.sort();
                return Ok(out);
            }
            i -= 1;
            if t[i] < hi[i] {
                t[i] += 1;
                break;
            }
            t[i] = lo[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_field::catalog_field;

    #[test]
    fn arithmetic_progression_in_q() {
        let q = catalog_field("Q").unwrap();
        let cyl = Polycylinder::new(&q, vec![20.0]).unwrap();
        let six = Ideal::principal_int(&q, 6);
        let e = enumerate_polycylinder(&q, &cyl, Some((&q.from_int(0), &six)), ENUMERATION_BUDGET).unwrap();
        let got: Vec<i128> = e.points.iter().map(|x| x.0[0]).collect();
        assert_eq!(got, vec![-18, -12, -6, 0, 6, 12, 18]);
    }

    fn naive(field: &NumberFieldSpec, cyl: &Polycylinder, span: i128) -> Vec<FieldElement> {
        let mut out = Vec::new();
        for a in -span..=span {
            for b in -span..=span {
                let x = FieldElement(vec![a, b]);
                if exact_inside(field, &x, cyl).unwrap() {
                    out.push(x);
                }
            }
        }
        out
    }

    #[test]
    fn golden_field_matches_double_loop() {
        let k = catalog_field("Q(sqrt5)").unwrap();
        let cyl = Polycylinder::new(&k, vec![3.0, 3.0]).unwrap();
        let e = enumerate_polycylinder(&k, &cyl, None, ENUMERATION_BUDGET).unwrap();
        assert_eq!(e.points, naive(&k, &cyl, 10));
        assert!(e.ambiguous.is_empty());
        for n in [0, 1, 2, 3] {
            assert!(e.points.contains(&k.from_int(n)) && e.points.contains(&k.from_int(-n)));
        }
    }

    #[test]
    fn boundary_points_are_decided_exactly() {
        // |a + bi|^2 = 25 has twelve solutions on the boundary.
        let gi = catalog_field("Q(i)").unwrap();
        let cyl = Polycylinder::new(&gi, vec![25.0]).unwrap();
        let e = enumerate_polycylinder(&gi, &cyl, None, ENUMERATION_BUDGET).unwrap();
        assert_eq!(e.points, naive(&gi, &cyl, 6));
        assert_eq!(e.count(), 81);
    }

    #[test]
    fn small_cylinders_hold_only_zero() {
        for name in ["Q", "Q(i)", "Q(sqrt5)", "Q(zeta5)"] {
            let k = catalog_field(name).unwrap();
            let cyl = Polycylinder::new(&k, vec![0.3; k.places()]).unwrap();
            let e = enumerate_polycylinder(&k, &cyl, None, ENUMERATION_BUDGET).unwrap();
            assert_eq!(e.points, vec![FieldElement(vec![0; k.degree()])], "{name}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let k = catalog_field("Q(zeta5)").unwrap();
        let cyl = Polycylinder::new(&k, vec![1e6, 1e6]).unwrap();
        assert!(matches!(enumerate_polycylinder(&k, &cyl, None, 1000), Err(FieldError::OverflowGuard { .. })));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let gi = catalog_field("Q(i)").unwrap();
        let cyl = Polycylinder::new(&gi, vec![1.0]).unwrap();
        let e = enumerate_polycylinder(&gi, &cyl, None, ENUMERATION_BUDGET).unwrap();
        let csv = e.to_csv(&gi);
        assert!(csv.starts_with("coords,re_0,im_0\n"));
        assert_eq!(csv.lines().count(), 6);
    }
}
