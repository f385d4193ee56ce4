//! `L(1, chi)` for quadratic Dirichlet characters.
//!
//! The smoothed evaluation splits the Mellin integral at the symmetric
//! point of the functional equation. For a primitive real character of
//! conductor `q`,
//!
//! ```text
//! odd:  L(1, chi) = sum chi(n) [ exp(-pi n^2 / q) / n + (pi / sqrt q) erfc(n sqrt(pi/q)) ]
//! even: L(1, chi) = sum chi(n) [ erfc(n sqrt(pi/q)) / n + E1(pi n^2 / q) / sqrt q ]
//! ```
//!
//! and both series converge like `exp(-pi n^2 / q)`.

use crate::arith::kronecker;
use crate::Interval;
use serde::{Deserialize, Serialize};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Truncation exponent: terms stop at `pi N^2 / q = 39`.
const SMOOTH_CUTOFF: f64 = 39.0;

/// Exponential integral `E1(x)` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 needs a positive argument");
    if x < 1.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..64 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum -= add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // Modified Lentz on the continued fraction 1/(x+1-1/(x+3-4/(x+5-...))).
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// The fundamental discriminant of `Q(sqrt s)` for squarefree `s != 1`.
pub fn fundamental_discriminant(s: i128) -> i128 {
    assert!(s != 0 && s != 1, "not a quadratic field");
    if s.rem_euclid(4) == 1 {
        s
    } else {
        4 * s
    }
}

/// How an `L(1, chi)` enclosure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LMethod {
    /// Smoothed character sum with an explicit tail bound.
    Smoothed,
    /// Elementary bound `0 < L(1, chi) <= log q + 3/2`.
    Elementary,
    /// Truncated Euler product; the tail is estimated, not bounded.
    EulerProduct,
}

impl LMethod {
    pub fn is_rigorous(self) -> bool {
        !matches!(self, Self::EulerProduct)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub value: Interval,
    pub method: LMethod,
}

/// `L(1, chi_d)` for a fundamental discriminant `d != 1`, by the smoothed sum.
pub fn l_one_smoothed(d: i128) -> Interval {
    let q = d.unsigned_abs() as f64;
    let odd = d < 0;
    let a = (std::f64::consts::PI / q).sqrt();
    let n_max = (SMOOTH_CUTOFF * q / std::f64::consts::PI).sqrt().ceil() as u64;
    let root_q = q.sqrt();
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for n in 1..=n_max {
        let chi = kronecker(d, n);
        if chi == 0 {
            continue;
        }
        let nf = n as f64;
        let y = a * a * nf * nf;
        let term = if odd {
            (-y).exp() / nf + std::f64::consts::PI / root_q * libm::erfc(a * nf)
        } else {
            libm::erfc(a * nf) / nf + exp_integral_e1(y) / root_q
        };
        sum += chi as f64 * term;
        magnitude += term.abs();
    }
    // Every dropped term is at most (1 + pi) exp(-pi n^2 / q).
    let nf = n_max as f64;
    let tail = 5.0 * (-a * a * nf * nf).exp() / ((2.0 * a * a * nf).exp() - 1.0);
    // libm's erfc and exp carry a few ulps each.
    let rounding = 64.0 * f64::EPSILON * magnitude;
    let slack = tail + rounding;
    Interval::new(sum - slack, sum + slack)
}

/// `0 < L(1, chi) <= H_q + 1/2 <= log q + 3/2`: partial sums of `chi` over
/// any interval are at most `q/2` in size, so the tail past `q` is below
/// `1/2` by partial summation.
pub fn l_one_elementary(q: u128) -> Interval {
    let q = q.max(2) as f64;
    Interval::new(0.0, (Interval::point(q).ln() + Interval::point(1.5)).hi)
}

/// `L(1, chi_d)` with the smoothed sum when `|d| <= exact_limit`, otherwise
/// the elementary bound.
pub fn l_one_rational(d: i128, exact_limit: u128) -> LValue {
    if d.unsigned_abs() <= exact_limit {
        LValue { value: l_one_smoothed(d), method: LMethod::Smoothed }
    } else {
        LValue { value: l_one_elementary(d.unsigned_abs()), method: LMethod::Elementary }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Partial sums of the Dirichlet series, averaged over a full period so
    /// the remainder is `O(q / N^2)`.
    fn cesaro_oracle(d: i128, periods: u64) -> f64 {
        let q = d.unsigned_abs() as u64;
        let n = q * periods;
        let mut partial = 0.0;
        let mut acc = 0.0;
        for m in 1..=n {
            partial += kronecker(d, m) as f64 / m as f64;
            if m > n - q {
                acc += partial;
            }
        }
        acc / q as f64
    }

    #[test]
    fn e1_matches_known_values() {
        assert!((exp_integral_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((exp_integral_e1(0.1) - 1.822_923_958_419_390_7).abs() < 1e-14);
        assert!((exp_integral_e1(5.0) - 0.001_148_295_591_275_325_8).abs() < 1e-17);
        assert!((exp_integral_e1(0.999_999) - exp_integral_e1(1.000_001)).abs() < 1e-6);
    }

    #[test]
    fn classical_values() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let cases = [
            (-4, PI / 4.0),
            (-3, PI / (3.0 * 3f64.sqrt())),
            (5, 2.0 / 5f64.sqrt() * phi.ln()),
            (8, (1.0 + 2f64.sqrt()).ln() / 2f64.sqrt()),
            (12, (2.0 + 3f64.sqrt()).ln() / 3f64.sqrt()),
        ];
        for (d, want) in cases {
            let l = l_one_smoothed(d);
            assert!(l.contains(want), "d = {d}: {l} vs {want}");
            assert!(l.width() < 1e-12, "d = {d}: width {}", l.width());
        }
    }

    #[test]
    fn class_number_formula_for_imaginary_fields() {
        // h(d) = w sqrt|d| L(1, chi_d) / (2 pi) for d < -4.
        for (d, h) in [(-7, 1.0), (-15, 2.0), (-23, 3.0), (-47, 5.0), (-71, 7.0), (-199, 9.0)] {
            let l = l_one_smoothed(d);
            let got = 2.0 * (-d as f64).sqrt() * l.mid() / (2.0 * PI);
            assert!((got - h).abs() < 1e-10, "d = {d}: {got}");
        }
    }

    #[test]
    fn smoothed_sum_agrees_with_averaged_partial_sums() {
        for d in [13i128, -20, 21, -43, 60, -84, 97] {
            let l = l_one_smoothed(d);
            let oracle = cesaro_oracle(d, 4000);
            assert!((l.mid() - oracle).abs() < 1e-5, "d = {d}: {} vs {oracle}", l.mid());
        }
    }

    #[test]
    fn elementary_bound_dominates() {
        for d in [5i128, -4, 8, -3, 12, -23, 4044, -1019] {
            let l = l_one_smoothed(d);
            assert!(l.hi <= l_one_elementary(d.unsigned_abs()).hi, "d = {d}");
        }
        assert_eq!(l_one_rational(-4, 3).method, LMethod::Elementary);
        assert_eq!(l_one_rational(-4, 4).method, LMethod::Smoothed);
    }

    #[test]
    fn fundamental_discriminants() {
        assert_eq!(fundamental_discriminant(-1), -4);
        assert_eq!(fundamental_discriminant(5), 5);
        assert_eq!(fundamental_discriminant(3), 12);
        assert_eq!(fundamental_discriminant(2), 8);
        assert_eq!(fundamental_discriminant(-3), -3);
    }
}
