//! Elementary integer arithmetic: modular powers, residue symbols, sieves and
//! factorization.

use num_integer::Integer;

pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    // 128-bit division is a library call; skip it when the product fits.
    match a.checked_mul(b) {
        Some(ab) => ab % m,
        None => ((a as u128 * b as u128) % m as u128) as u64,
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Canonical representative of `a mod m` in `[0, m)`.
pub fn rem(a: i128, m: u64) -> u64 {
    match (i64::try_from(a), i64::try_from(m)) {
        (Ok(a), Ok(m)) => a.rem_euclid(m) as u64,
        _ => a.rem_euclid(m as i128) as u64,
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// `p`-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(p: u64, n: i128) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let p = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Some(v)
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i128, n: u64) -> i32 {
    assert!(n % 2 == 1, "Jacobi symbol needs odd modulus");
    let mut a = rem(a, n);
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol `(d/n)` for `n >= 1`.
pub fn kronecker(d: i128, n: u64) -> i32 {
    assert!(n >= 1);
    let mut n = n;
    let mut acc = 1;
    while n.is_multiple_of(2) {
        n /= 2;
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if r == 3 || r == 5 {
            acc = -acc;
        }
    }
    if n == 1 {
        return acc;
    }
    acc * jacobi(d, n)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Factorization of `n`. Cofactors that fit in 64 bits are split by
/// Pollard's rho, which always finishes; above that only trial division is
/// used, and `None` is returned once the divisor passes `budget`.
pub fn factor_with_budget(n: u128, budget: u64) -> Option<Vec<(u128, u32)>> {
    assert!(n >= 1);
    let mut n = n;
    let mut found: Vec<u64> = Vec::new();
    let mut d: u64 = 2;
    while n > u64::MAX as u128 && (d as u128) * (d as u128) <= n {
        if d > budget {
            return None;
        }
        while n.is_multiple_of(d as u128) {
            n /= d as u128;
            found.push(d);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut out: Vec<(u128, u32)> = Vec::new();
    if n > u64::MAX as u128 {
        out.push((n, 1));
    } else {
        split_u64(n as u64, &mut found);
    }
    found.sort_unstable();
    for p in found {
        match out.iter_mut().find(|(q, _)| *q == p as u128) {
            Some((_, e)) => *e += 1,
            None => out.push((p as u128, 1)),
        }
    }
    out.sort_unstable();
    Some(out)
}

fn split_u64(mut n: u64, out: &mut Vec<u64>) {
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while n.is_multiple_of(p) {
            n /= p;
            out.push(p);
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            out.push(m);
            continue;
        }
        let d = pollard_brent(m);
        stack.push(d);
        stack.push(m / d);
    }
}

/// A nontrivial divisor of an odd composite `n` with no factor below 41.
fn pollard_brent(n: u64) -> u64 {
    let r = (n as f64).sqrt() as u64;
    for s in r.saturating_sub(1)..=r + 1 {
        if s > 1 && s.checked_mul(s) == Some(n) {
            return s;
        }
    }
    for c in 1.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
        let mut ys = y;
        let mut len = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..len {
                y = f(y);
            }
            let mut k = 0;
            while k < len && g == 1 {
                ys = y;
                for _ in 0..(len - k).min(128) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = n.gcd(&q);
                k += 128;
            }
            len *= 2;
        }
        if g == n {
            // The batch overshot; retrace one step at a time.
            loop {
                ys = f(ys);
                g = n.gcd(&x.abs_diff(ys));
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("some constant gives a proper factor")
}

pub fn factor(n: u128) -> Vec<(u128, u32)> {
    factor_with_budget(n, u64::MAX).expect("unbounded budget")
}

/// Squarefree kernel of a nonzero integer, keeping the sign:
/// `n = s * m^2` with `s` squarefree.
pub fn squarefree_part(n: i128) -> i128 {
    assert!(n != 0);
    let sign = n.signum();
    let mut s: i128 = 1;
    for (p, e) in factor(n.unsigned_abs()) {
        if e % 2 == 1 {
            s *= p as i128;
        }
    }
    sign * s
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli–Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            for a in -30i128..30 {
                let e = pow_mod(a.rem_euclid(p as i128) as u64, (p - 1) / 2, p);
                let expect = if a % p as i128 == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(kronecker(a, p), expect, "a={a} p={p}");
            }
        }
        // (d/2) for odd d is +1 iff d = +-1 mod 8.
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(-4, 3), -1);
    }

    fn next_prime(mut n: u64) -> u64 {
        while !is_prime(n) {
            n += 1;
        }
        n
    }

    #[test]
    fn budget_only_limits_wide_cofactors() {
        let p = 1_000_000_007u128;
        // Three primes near 1e9 give a 90-bit product.
        assert_eq!(factor_with_budget(p * p * p, 10), None);
        assert_eq!(factor_with_budget(p * p * p, 2_000_000_000), Some(vec![(p, 3)]));
        assert_eq!(factor_with_budget(2 * p * p, 0), Some(vec![(2, 1), (p, 2)]));
    }

    #[test]
    fn sieve_counts() {
        assert_eq!(primes_up_to(100).len(), 25);
        assert_eq!(primes_up_to(100_000).len(), 9592);
    }

    proptest! {
        #[test]
        fn factorization_multiplies_back(n in 1u64..10_000_000) {
            let f = factor(n as u128);
            let prod: u128 = f.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(prod, n as u128);
            for (p, _) in f { prop_assert!(is_prime(p as u64)); }
        }

        #[test]
        fn large_semiprimes_split(a in 1_000_000u64..2_000_000_000, b in 1_000_000u64..2_000_000_000, k in 1u64..4) {
            let (p, q) = (next_prime(a), next_prime(b));
            let n = p as u128 * q as u128 * k as u128;
            let f = factor_with_budget(n, 0).expect("64-bit inputs always factor");
            let prod: u128 = f.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(prod, n);
            prop_assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
            for (r, _) in f { prop_assert!(is_prime(r as u64)); }
        }

        #[test]
        fn tonelli_shanks_squares_back(p_idx in 1usize..200, a in 1u64..1_000_000) {
            let p = primes_up_to(2000)[p_idx];
            let sq = mul_mod(a % p, a % p, p);
            let r = sqrt_mod_prime(sq, p).unwrap();
            prop_assert_eq!(mul_mod(r, r, p), sq);
        }
    }
}
