//! Closed real intervals with outward rounding.
//!
//! Basic arithmetic rounds each endpoint one ulp outward. Transcendental
//! functions come from the platform libm, which is not correctly rounded, so
//! their results are widened by a few ulps in relative terms.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Relative widening applied after libm calls (a handful of ulps).
const LIBM_SLACK: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    /// Degenerate interval for a value that is exactly representable.
    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// Interval around a computed value that may carry a relative error of a
    /// few ulps.
    pub fn approx(x: f64) -> Self {
        Self::point(x).widen_rel(LIBM_SLACK)
    }

    /// Exact rational `num/den`, enclosed with one-ulp rounding.
    pub fn ratio(num: i128, den: i128) -> Self {
        assert!(den != 0);
        let v = num as f64 / den as f64;
        Self::new(down(v), up(v)).widen_rel(2.0 * f64::EPSILON)
    }

    pub fn pi() -> Self {
        // f64 PI is below the true value by about 1.2e-16.
        Self::new(std::f64::consts::PI, up(std::f64::consts::PI))
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn widen_rel(self, rel: f64) -> Self {
        let r = rel * self.lo.abs().max(self.hi.abs());
        Self::new(down(self.lo - r), up(self.hi + r))
    }

    pub fn widen_abs(self, eps: f64) -> Self {
        Self::new(down(self.lo - eps), up(self.hi + eps))
    }

    pub fn hull(self, other: Interval) -> Self {
        Self::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn sqrt(self) -> Self {
        assert!(self.lo >= 0.0, "sqrt of interval with negative part");
        // IEEE sqrt is correctly rounded.
        Self::new(down(self.lo.sqrt()).max(0.0), up(self.hi.sqrt()))
    }

    pub fn exp(self) -> Self {
        Self::new(self.lo.exp(), self.hi.exp()).widen_rel(LIBM_SLACK)
    }

    pub fn ln(self) -> Self {
        assert!(self.lo > 0.0, "log of non-positive interval");
        let lo = self.lo.ln();
        let hi = self.hi.ln();
        let slack = LIBM_SLACK * lo.abs().max(hi.abs()).max(1e-300);
        Self::new(down(lo - slack), up(hi + slack))
    }

    /// Integer power by repeated multiplication.
    pub fn powi(self, n: u32) -> Self {
        let mut acc = Interval::point(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    /// `self^e` for a positive base and real exponent.
    pub fn powf(self, e: f64) -> Self {
        (self.ln() * Interval::point(e)).exp()
    }

    pub fn recip(self) -> Self {
        Interval::point(1.0) / self
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::new(down(self.lo + o.lo), up(self.hi + o.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::new(down(self.lo - o.hi), up(self.hi - o.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        outward(pairs.map(|(a, b)| (a * b, a == 0.0 || b == 0.0)))
    }
}

/// Hull of candidate endpoints, rounding outward all but the exact ones
/// (products with a zero factor).
fn outward(c: [(f64, bool); 4]) -> Interval {
    let lo = c.iter().map(|&(x, exact)| if exact { x } else { down(x) }).fold(f64::INFINITY, f64::min);
    let hi = c.iter().map(|&(x, exact)| if exact { x } else { up(x) }).fold(f64::NEG_INFINITY, f64::max);
    Interval::new(lo, hi)
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        assert!(o.lo > 0.0 || o.hi < 0.0, "division by interval containing zero");
        let pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        outward(pairs.map(|(a, b)| (a / b, a == 0.0)))
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, o: f64) -> Interval {
        self * Interval::point(o)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, o: f64) -> Interval {
        self + Interval::point(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pi_is_enclosed() {
        let p = Interval::pi();
        assert!(p.lo < p.hi);
        // 3.14159265358979323846... lies strictly between the two doubles.
        assert!(p.lo <= std::f64::consts::PI && p.hi > std::f64::consts::PI);
    }

    #[test]
    fn ratio_encloses_thirds() {
        let t = Interval::ratio(1, 3) * Interval::point(3.0);
        assert!(t.contains(1.0));
    }

    proptest! {
        #[test]
        fn arithmetic_encloses_point_results(a in -1e6f64..1e6, b in -1e6f64..1e6, c in 0.5f64..1e3) {
            let (ia, ib, ic) = (Interval::point(a), Interval::point(b), Interval::point(c));
            prop_assert!((ia + ib).contains(a + b));
            prop_assert!((ia - ib).contains(a - b));
            prop_assert!((ia * ib).contains(a * b));
            prop_assert!((ia / ic).contains(a / c));
            prop_assert!(ic.ln().exp().contains(c));
            prop_assert!(ic.sqrt().contains(c.sqrt()));
        }
    }
}
