//! Rigorous enclosures of `zeta_k(2)` from a truncated Euler product and an
//! explicit tail majorant.

use super::poly::factor_degrees_mod_p;
use super::NumberFieldSpec;
use crate::arith::primes_up_to;
use crate::Interval;

/// Upper bound for `sum_{p > x} p^{-2}`. Primes in `(x, 16x]` are summed
/// exactly; beyond that Dusart's `pi(t) <= t/ln t (1 + 1.2762/ln t)` and
/// partial summation give
/// `-pi(X)/X^2 + 2 (E1(ln X) + 1.2762/(X ln^2 X))` with `E1(z) <= e^{-z} ln(1 + 1/z)`.
pub fn prime_tail_sum(x: u64) -> Interval {
    let far = x.max(2) * 16;
    let primes = primes_up_to(far);
    let mut near = Interval::point(0.0);
    for &p in primes.iter().rev().take_while(|&&p| p > x) {
        let pp = Interval::point(p as f64);
        near = near + (pp * pp).recip();
    }
    let xf = Interval::point(far as f64);
    let lx = xf.ln();
    let pi_x = Interval::point(primes.len() as f64);
    let e1 = (-lx).exp() * (Interval::point(1.0) + lx.recip()).ln();
    let correction = Interval::point(1.2762) / (xf * lx * lx);
    let far_bound = Interval::point(2.0) * (e1 + correction) - pi_x / (xf * xf);
    Interval::new(near.lo, (near + far_bound).hi)
}

/// `(1 - N^{-2})^{-1}` for `N = p^f`.
fn euler_factor(p: u64, f: u32) -> Interval {
    let n = Interval::point(p as f64).powi(f);
    let one = Interval::point(1.0);
    (one - (n * n).recip()).recip()
}

/// Enclosure of `zeta_k(2)`: the lower end is the Euler product over prime
/// ideals of norm at most `prime_bound`; the upper end adds the remaining
/// factors at `p <= prime_bound` and the majorant
/// `prod_{p > prime_bound} (1 - p^{-2})^{-d}`.
pub fn dedekind_zeta2(field: &NumberFieldSpec, prime_bound: u64) -> Interval {
    assert!(prime_bound >= 2, "prime bound must be at least 2");
    let d = field.degree() as u32;
    let one = Interval::point(1.0);
    let mut lower = one;
    let mut extra = one;
    for p in primes_up_to(prime_bound) {
        if field.index % p as i128 == 0 {
            // Splitting unknown here: the factor lies in [1, (1-p^-2)^-d].
            extra = extra * euler_factor(p, 1).powi(d);
            continue;
        }
        for (f, _e) in factor_degrees_mod_p(&field.poly, p) {
            let fac = euler_factor(p, f);
            if (p as u128).pow(f) <= prime_bound as u128 {
                lower = lower * fac;
            } else {
                extra = extra * fac;
            }
        }
    }
    let b = Interval::point(prime_bound as f64);
    // -ln(1 - t) <= t / (1 - t) for t = p^-2 <= b^-2.
    let log_tail = Interval::point(d as f64) * prime_tail_sum(prime_bound) / (one - (b * b).recip());
    let upper = lower * extra * log_tail.exp();
    Interval::new(lower.lo, upper.hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_field::catalog_field;
    use std::f64::consts::PI;

    /// Catalan's constant by its alternating series with an explicit
    /// remainder bound.
    fn catalan() -> f64 {
        let mut s = 0.0;
        for k in (0..2_000_000u64).rev() {
            let t = 1.0 / ((2 * k + 1) as f64).powi(2);
            s += if k % 2 == 0 { t } else { -t };
        }
        s
    }

    #[test]
    fn rationals_enclose_pi_squared_over_six() {
        let q = catalog_field("Q").unwrap();
        let z = dedekind_zeta2(&q, 100_000);
        assert!(z.contains(PI * PI / 6.0), "{z}");
        assert!(z.width() < 1e-4);
    }

    #[test]
    fn gaussian_field_matches_catalan() {
        let gi = catalog_field("Q(i)").unwrap();
        let z = dedekind_zeta2(&gi, 100_000);
        let want = PI * PI / 6.0 * catalan();
        assert!((want - 1.5067).abs() < 1e-4);
        assert!(z.contains(want), "{z} vs {want}");
    }

    #[test]
    fn tiny_bound_still_valid() {
        for name in ["Q", "Q(i)", "Q(sqrt5)", "Q(zeta5)"] {
            let k = catalog_field(name).unwrap();
            let z = dedekind_zeta2(&k, 2);
            assert!(z.lo >= 1.0);
            assert!(z.contains(dedekind_zeta2(&k, 50_000).mid()));
        }
    }

    #[test]
    fn enclosures_are_nested() {
        for name in ["Q", "Q(i)", "Q(sqrt5)", "Q(zeta5)"] {
            let k = catalog_field(name).unwrap();
            let mut prev: Option<Interval> = None;
            for b in [2u64, 10, 100, 1000, 10_000] {
                let z = dedekind_zeta2(&k, b);
                if let Some(p) = prev {
                    assert!(p.contains_interval(&z), "{name} b={b}: {p} vs {z}");
                }
                prev = Some(z);
            }
        }
    }

    #[test]
    fn tail_bound_dominates_direct_sum() {
        let x = 1000;
        let direct: f64 = primes_up_to(2_000_000).into_iter().filter(|&p| p > x).map(|p| 1.0 / (p as f64).powi(2)).sum();
        let t = prime_tail_sum(x);
        assert!(t.hi >= direct && t.hi < direct * 1.05, "{t} vs {direct}");
    }
}
