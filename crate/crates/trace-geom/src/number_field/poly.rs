//! Integer polynomials and polynomials over `F_p`, with factorization modulo
//! `p`: square-free decomposition, distinct-degree and equal-degree splitting
//! for odd `p` above the degree, trial division otherwise.

use crate::arith::{inv_mod, mul_mod};
use rand::{Rng, SeedableRng};

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Discriminant of a monic integer polynomial (coefficients low to high),
/// as `(-1)^{n(n-1)/2} Res(f, f')`.
pub fn discriminant(f: &[i128]) -> i128 {
    let n = f.len() - 1;
    if n == 1 {
        return 1;
    }
    let df: Vec<i128> = (1..=n).map(|i| f[i] * i as i128).collect();
    // Sylvester matrix of f (degree n) and f' (degree n-1), size 2n-1.
    let size = 2 * n - 1;
    let mut s = vec![vec![0i128; size]; size];
    for row in 0..n - 1 {
        for (i, &c) in f.iter().rev().enumerate() {
            s[row][row + i] = c;
        }
    }
    for row in 0..n {
        for (i, &c) in df.iter().rev().enumerate() {
            s[n - 1 + row][row + i] = c;
        }
    }
    let res = bareiss_det(s);
    if (n * (n - 1) / 2).is_multiple_of(2) {
        res
    } else {
        -res
    }
}

/// A polynomial over `F_p`, coefficients low to high, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { p, coeffs }
    }

    pub fn from_int(p: u64, f: &[i128]) -> Self {
        Self::new(p, f.iter().map(|&c| c.rem_euclid(p as i128) as u64).collect())
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lead(&self) -> u64 {
        *self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p).expect("field");
        Self::new(self.p, self.coeffs.iter().map(|&c| mul_mod(c, inv, self.p)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&0) + o.coeffs.get(i).unwrap_or(&0))
            .collect();
        Self::new(self.p, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p;
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&0) + p - o.coeffs.get(i).unwrap_or(&0))
            .collect();
        Self::new(p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(self.p, vec![]);
        }
        let mut c = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::new(self.p, c)
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        let inv = inv_mod(d.lead(), p).expect("field");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        if r.len() <= dd {
            return (Self::new(p, vec![]), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = mul_mod(r[i + dd], inv, p);
            q[i] = c;
            if c != 0 {
                for (j, &dj) in d.coeffs.iter().enumerate() {
                    r[i + j] = (r[i + j] + p - mul_mod(c, dj, p)) % p;
                }
            }
        }
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % self.p, self.p))
            .collect();
        Self::new(self.p, c)
    }

    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Norm of `self mod m` from `F_p[t]/m` down to `F_p`, as the
    /// determinant of multiplication by `self`; `m` must be monic.
    pub fn norm_mod(&self, m: &Self) -> u64 {
        let p = self.p;
        let n = m.degree();
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n);
        let mut cur = self.rem(m);
        for _ in 0..n {
            let mut row = cur.coeffs.clone();
            row.resize(n, 0);
            rows.push(row);
            cur = cur.mul(&Self::x(p)).rem(m);
        }
        let mut det = 1u64;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| rows[r][col] != 0) else {
                return 0;
            };
            if piv != col {
                rows.swap(piv, col);
                det = (p - det) % p;
            }
            det = mul_mod(det, rows[col][col], p);
            let inv = inv_mod(rows[col][col], p).expect("nonzero pivot");
            for r in col + 1..n {
                let f = mul_mod(rows[r][col], inv, p);
                if f == 0 {
                    continue;
                }
                for c in col..n {
                    let sub = mul_mod(f, rows[col][c], p);
                    rows[r][c] = (rows[r][c] + p - sub) % p;
                }
            }
        }
        det
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, self.p) + c) % self.p)
    }
}

/// Monic irreducible factors with multiplicities, sorted.
pub type Factorization = Vec<(FpPoly, u32)>;

/// Factor a monic integer polynomial modulo `p`.
pub fn factor_mod_p(f: &[i128], p: u64) -> Factorization {
    let fp = FpPoly::from_int(p, f);
    let mut out = if p > 2 && p as usize > fp.degree() {
        factor_fast(&fp)
    } else {
        factor_trial(&fp)
    };
    out.sort();
    out
}

/// Degrees of the irreducible factors modulo `p` with multiplicities,
/// without splitting equal-degree blocks.
pub fn factor_degrees_mod_p(f: &[i128], p: u64) -> Vec<(u32, u32)> {
    let fp = FpPoly::from_int(p, f);
    let mut out = Vec::new();
    if p > 2 && p as usize > fp.degree() {
        for (part, mult) in squarefree(&fp) {
            for (block, k) in distinct_degree(&part) {
                for _ in 0..block.degree() / k {
                    out.push((k as u32, mult));
                }
            }
        }
    } else {
        out = factor_trial(&fp).into_iter().map(|(g, e)| (g.degree() as u32, e)).collect();
    }
    out.sort();
    out
}

/// Trial division by all monic polynomials of degree up to half the degree.
pub fn factor_trial(f: &FpPoly) -> Factorization {
    let p = f.p;
    let mut rest = f.monic();
    let mut out = Vec::new();
    let mut deg = 1;
    while 2 * deg <= rest.degree() {
        // All monic polynomials of this degree.
        let count = p.pow(deg as u32);
        for idx in 0..count {
            let mut coeffs = Vec::with_capacity(deg + 1);
            let mut k = idx;
            for _ in 0..deg {
                coeffs.push(k % p);
                k /= p;
            }
            coeffs.push(1);
            let g = FpPoly::new(p, coeffs);
            let mut e = 0;
            loop {
                let (q, r) = rest.div_rem(&g);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                out.push((g, e));
            }
        }
        deg += 1;
    }
    if rest.degree() > 0 {
        // No factor of degree <= deg(rest)/2 remains: irreducible, possibly
        // repeating an earlier factor.
        match out.iter_mut().find(|(g, _)| *g == rest) {
            Some(entry) => entry.1 += 1,
            None => out.push((rest, 1)),
        }
    }
    out
}

/// Square-free decomposition (Yun); valid when `p` exceeds the degree.
pub fn squarefree(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let f = f.monic();
    let df = f.derivative();
    let a = f.gcd(&df);
    let mut b = f.div_rem(&a).0;
    let mut c = df.div_rem(&a).0;
    let mut d = c.sub(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree() > 0 {
        let ai = b.gcd(&d);
        b = b.div_rem(&ai).0;
        c = d.div_rem(&ai).0;
        d = c.sub(&b.derivative());
        if ai.degree() > 0 {
            out.push((ai, i));
        }
        i += 1;
    }
    out
}

/// Distinct-degree factorization of a square-free monic polynomial.
pub fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut h = f.clone();
    let mut w = FpPoly::x(p);
    let mut out = Vec::new();
    let mut i = 1;
    while h.degree() >= 2 * i {
        w = w.pow_mod(p as u128, &h);
        let g = h.gcd(&w.sub(&FpPoly::x(p)));
        if g.degree() > 0 {
            h = h.div_rem(&g).0;
            w = w.rem(&h);
            out.push((g, i));
        }
        i += 1;
    }
    if h.degree() > 0 {
        let d = h.degree();
        out.push((h, d));
    }
    out
}

/// Cantor–Zassenhaus splitting of a product of irreducibles of degree `k`,
/// for odd `p`. Deterministic: the random source is seeded from `p`.
pub fn equal_degree(f: &FpPoly, k: usize) -> Vec<FpPoly> {
    let p = f.p;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(p ^ 0x9e37_79b9_7f4a_7c15);
    let mut todo = vec![f.monic()];
    let mut out = Vec::new();
    let e = ((p as u128).pow(k as u32) - 1) / 2;
    while let Some(g) = todo.pop() {
        if g.degree() == k {
            out.push(g);
            continue;
        }
        loop {
            let a = FpPoly::new(p, (0..g.degree()).map(|_| rng.gen_range(0..p)).collect());
            if a.degree() == 0 {
                continue;
            }
            let t = a.pow_mod(e, &g).sub(&FpPoly::one(p));
            let u = g.gcd(&t);
            if u.degree() > 0 && u.degree() < g.degree() {
                let v = g.div_rem(&u).0.monic();
                todo.push(u);
                todo.push(v);
                break;
            }
        }
    }
    out
}

fn factor_fast(f: &FpPoly) -> Factorization {
    let mut out = Vec::new();
    for (part, mult) in squarefree(f) {
        for (block, k) in distinct_degree(&part) {
            for g in equal_degree(&block, k) {
                out.push((g, mult));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;
    use proptest::prelude::*;

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(&[1, 0, 1]), -4);
        assert_eq!(discriminant(&[-1, -1, 1]), 5);
        assert_eq!(discriminant(&[1, 1, 1, 1, 1]), 125);
        assert_eq!(discriminant(&[0, 1]), 1);
        // x^3 - 2: -27 * 4.
        assert_eq!(discriminant(&[-2, 0, 0, 1]), -108);
    }

    #[test]
    fn norms_in_extension_fields() {
        // F_7[t]/(t^2 + 1): N(a + b t) = a^2 + b^2.
        let g = FpPoly::new(7, vec![1, 0, 1]);
        for a in 0..7 {
            for b in 0..7 {
                assert_eq!(FpPoly::new(7, vec![a, b]).norm_mod(&g), (a * a + b * b) % 7);
            }
        }
        // Over a cubic residue field the norm is multiplicative.
        let g = factor_mod_p(&[-2, 0, 0, 1], 7).into_iter().find(|(g, _)| g.degree() == 3).unwrap().0;
        let (u, v) = (FpPoly::new(7, vec![3, 1, 5]), FpPoly::new(7, vec![2, 0, 4]));
        assert_eq!(u.mul(&v).norm_mod(&g), u.norm_mod(&g) * v.norm_mod(&g) % 7);
        assert_eq!(FpPoly::new(7, vec![4]).norm_mod(&g), 64 % 7);
    }

    #[test]
    fn gaussian_primes() {
        let f = factor_mod_p(&[1, 0, 1], 5);
        assert_eq!(f.len(), 2);
        let f = factor_mod_p(&[1, 0, 1], 2);
        assert_eq!(f, vec![(FpPoly::new(2, vec![1, 1]), 2)]);
        let f = factor_mod_p(&[1, 0, 1], 7);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].0.degree(), 2);
    }

    proptest! {
        #[test]
        fn fast_factorization_matches_trial_division(
            c in proptest::collection::vec(-20i128..20, 4),
            pi in 2usize..15,
        ) {
            let p = primes_up_to(50)[pi];
            let mut f = c.clone();
            f.push(1);
            let fp = FpPoly::from_int(p, &f);
            let mut fast = factor_fast(&fp);
            fast.sort();
            let mut slow = factor_trial(&fp);
            slow.sort();
            prop_assert_eq!(&fast, &slow);
            let prod = fast.iter().fold(FpPoly::one(p), |acc, (g, e)| {
                (0..*e).fold(acc, |a, _| a.mul(g))
            });
            prop_assert_eq!(prod, fp.monic());
            let degs: Vec<(u32, u32)> = {
                let mut d: Vec<(u32, u32)> = slow.iter().map(|(g, e)| (g.degree() as u32, *e)).collect();
                d.sort();
                d
            };
            prop_assert_eq!(factor_degrees_mod_p(&f, p), degs);
        }
    }
}
