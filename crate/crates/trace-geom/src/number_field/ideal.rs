//! Integral ideals as Hermite normal forms and prime splitting by
//! Kummer–Dedekind.

use super::poly::factor_mod_p;
use super::{FieldElement, FieldError, NumberFieldSpec, Q};
use num_traits::Zero;
use serde::Serialize;

/// A nonzero integral ideal, stored as the upper-triangular Hermite normal
/// form of a Z-basis in integral-basis coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Ideal {
    pub hnf: Vec<Vec<i128>>,
}

/// Row-style HNF of the lattice spanned by `rows` (which must have rank `d`).
fn hermite(mut rows: Vec<Vec<i128>>, d: usize) -> Vec<Vec<i128>> {
    let mut out = Vec::with_capacity(d);
    for col in 0..d {
        // Euclid down the column until a single nonzero pivot remains.
        loop {
            let mut nz: Vec<usize> = (0..rows.len()).filter(|&r| rows[r][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by_key(|&r| rows[r][col].abs());
            let piv = nz[0];
            let pv = rows[piv][col];
            let pivot_row = rows[piv].clone();
            for &r in &nz[1..] {
                let q = rows[r][col].div_euclid(pv);
                for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                    *x -= q * y;
                }
            }
        }
        let piv = rows.iter().position(|r| r[col] != 0).expect("lattice of full rank");
        let mut row = rows.swap_remove(piv);
        if row[col] < 0 {
            row.iter_mut().for_each(|x| *x = -*x);
        }
        out.push(row);
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    for i in (0..d).rev() {
        for k in 0..i {
            let q = out[k][i].div_euclid(out[i][i]);
            if q != 0 {
                let pivot_row = out[i].clone();
                for (x, y) in out[k].iter_mut().zip(&pivot_row) {
                    *x -= q * y;
                }
            }
        }
    }
    out
}

impl Ideal {
    /// The ideal generated by `gens` (at least one nonzero).
    pub fn generated_by(field: &NumberFieldSpec, gens: &[FieldElement]) -> Self {
        let d = field.degree();
        let mut rows = Vec::with_capacity(gens.len() * d);
        for g in gens {
            for j in 0..d {
                let mut e = vec![0i128; d];
                e[j] = 1;
                rows.push(field.mul(g, &FieldElement(e)).0);
            }
        }
        // Including N(g) for a nonzero generator keeps the lattice full rank
        // even when the products alone are degenerate numerically; it is
        // already in the ideal.
        if let Some(g) = gens.iter().find(|g| g.0.iter().any(|&c| c != 0)) {
            let n = field.norm(g).abs();
            rows.push(field.from_int(n).0);
        }
        Self { hnf: hermite(rows, d) }
    }

    pub fn unit(field: &NumberFieldSpec) -> Self {
        Self::generated_by(field, &[field.one()])
    }

    /// `m O` for a rational integer `m`.
    pub fn principal_int(field: &NumberFieldSpec, m: i128) -> Self {
        Self::generated_by(field, &[field.from_int(m)])
    }

    pub fn norm(&self) -> u128 {
        self.hnf.iter().enumerate().map(|(i, r)| r[i] as u128).product()
    }

    pub fn basis(&self) -> &[Vec<i128>] {
        &self.hnf
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        let mut v = x.0.clone();
        for (i, row) in self.hnf.iter().enumerate() {
            if v[i] % row[i] != 0 {
                return false;
            }
            let q = v[i] / row[i];
            for (a, b) in v.iter_mut().zip(row) {
                *a -= q * b;
            }
        }
        v.iter().all(|&c| c == 0)
    }

    /// Canonical representative of `x` modulo the ideal: coordinates reduced
    /// into `[0, hnf[i][i])` from the top.
    pub fn reduce(&self, x: &FieldElement) -> FieldElement {
        let mut v = x.0.clone();
        for (i, row) in self.hnf.iter().enumerate() {
            let q = v[i].div_euclid(row[i]);
            for (a, b) in v.iter_mut().zip(row) {
                *a -= q * b;
            }
        }
        FieldElement(v)
    }

    pub fn mul(&self, field: &NumberFieldSpec, other: &Ideal) -> Ideal {
        let d = field.degree();
        let mut rows = Vec::with_capacity(d * d + 1);
        for a in &self.hnf {
            for b in &other.hnf {
                rows.push(field.mul(&FieldElement(a.clone()), &FieldElement(b.clone())).0);
            }
        }
        let n = (self.norm() * other.norm()) as i128;
        rows.push(field.from_int(n).0);
        Ideal { hnf: hermite(rows, d) }
    }

    pub fn pow(&self, field: &NumberFieldSpec, k: u32) -> Ideal {
        let mut acc = Ideal::unit(field);
        for _ in 0..k {
            acc = acc.mul(field, self);
        }
        acc
    }
}

/// A prime ideal `p O + g(theta) O` above a rational prime `p`.
#[derive(Debug, Clone, Serialize)]
pub struct PrimeIdealData {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    /// Residue field size `p^f`.
    pub q: u64,
    /// `g(theta)` for the lifted irreducible factor `g` of the defining
    /// polynomial mod `p`.
    pub generator: FieldElement,
    pub ideal: Ideal,
}

impl PrimeIdealData {
    /// `v_P(x)` for a nonzero integral element.
    pub fn valuation(&self, field: &NumberFieldSpec, x: &FieldElement) -> Option<u32> {
        self.valuation_at_most(field, x, u32::MAX)
    }

    /// `min(v(x), cap)`, skipping the ideal powers beyond `cap`.
    pub fn valuation_at_most(&self, field: &NumberFieldSpec, x: &FieldElement, cap: u32) -> Option<u32> {
        if x.0.iter().all(|&c| c == 0) {
            return None;
        }
        let mut k = 0;
        let mut power = self.ideal.clone();
        while k < cap && power.contains(x) {
            k += 1;
            if k < cap {
                power = power.mul(field, &self.ideal);
            }
        }
        Some(k)
    }
}

/// Factor `p O` into prime ideals.
pub fn split_prime(field: &NumberFieldSpec, p: u64) -> Result<Vec<PrimeIdealData>, FieldError> {
    if field.index % p as i128 == 0 {
        return Err(FieldError::IndexDivisorUnsupported { p });
    }
    let mut out = Vec::new();
    for (g, e) in factor_mod_p(&field.poly, p) {
        let coords: Vec<Q> = g.coeffs.iter().map(|&c| Q::from_integer(c as i128)).collect();
        let generator = field.from_power_coords(&coords).expect("g(theta) is integral");
        let ideal = Ideal::generated_by(field, &[field.from_int(p as i128), generator.clone()]);
        let f = g.degree() as u32;
        out.push(PrimeIdealData { p, e, f, q: p.pow(f), generator, ideal });
    }
    out.sort_by(|a, b| (a.f, a.e, &a.ideal.hnf).cmp(&(b.f, b.e, &b.ideal.hnf)));
    Ok(out)
}

/// Every integral ideal of norm at most `bound`, sorted by norm and then HNF.
pub fn ideals_up_to_norm(field: &NumberFieldSpec, bound: u64) -> Result<Vec<Ideal>, FieldError> {
    let mut acc: Vec<Ideal> = vec![Ideal::unit(field)];
    for p in crate::arith::primes_up_to(bound) {
        let primes: Vec<PrimeIdealData> = split_prime(field, p)?.into_iter().filter(|pr| pr.q <= bound).collect();
        for pr in primes {
            let mut next = Vec::new();
            for a in &acc {
                let mut cur = a.clone();
                next.push(cur.clone());
                while cur.norm() * pr.q as u128 <= bound as u128 {
                    cur = cur.mul(field, &pr.ideal);
                    next.push(cur.clone());
                }
            }
            acc = next;
        }
    }
    acc.sort_by(|a, b| a.norm().cmp(&b.norm()).then_with(|| a.hnf.cmp(&b.hnf)));
    Ok(acc)
}

impl NumberFieldSpec {
    /// Element with the given power-basis coordinates, if integral. Terms of
    /// degree `>= d` are reduced by the defining polynomial.
    pub fn from_power_coords(&self, v: &[Q]) -> Option<FieldElement> {
        let d = self.degree();
        let mut w: Vec<Q> = v.to_vec();
        w.resize(w.len().max(d), Q::zero());
        for k in (d..w.len()).rev() {
            let lead = w[k];
            for (i, &fi) in self.poly.iter().enumerate().take(d) {
                w[k - d + i] -= lead * Q::from_integer(fi);
            }
        }
        w.truncate(d);
        let c: Option<Vec<i128>> = (0..d)
            .map(|k| {
                let s: Q = (0..d).map(|j| w[j] * self.basis_inv[j][k]).sum();
                s.is_integer().then(|| s.to_integer())
            })
            .collect();
        c.map(FieldElement)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_field::catalog_field;

    #[test]
    fn spec_examples() {
        let q = catalog_field("Q").unwrap();
        let s = split_prime(&q, 7).unwrap();
        assert_eq!((s.len(), s[0].e, s[0].f, s[0].q), (1, 1, 1, 7));
        let gi = catalog_field("Q(i)").unwrap();
        let s = split_prime(&gi, 5).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|p| p.e == 1 && p.f == 1 && p.q == 5));
        let s = split_prime(&gi, 2).unwrap();
        assert_eq!((s.len(), s[0].e, s[0].f, s[0].q), (1, 2, 1, 2));
    }

    #[test]
    fn ef_sums_to_degree_and_norms_multiply() {
        for name in ["Q", "Q(i)", "Q(sqrt5)", "Q(zeta5)"] {
            let k = catalog_field(name).unwrap();
            for p in crate::arith::primes_up_to(100) {
                let s = split_prime(&k, p).unwrap();
                let sum: u32 = s.iter().map(|x| x.e * x.f).sum();
                assert_eq!(sum as usize, k.degree(), "{name} p={p}");
                for pr in &s {
                    assert_eq!(pr.ideal.norm(), pr.q as u128, "{name} p={p} {:?}", pr);
                }
                let prod = s.iter().fold(Ideal::unit(&k), |acc, pr| acc.mul(&k, &pr.ideal.pow(&k, pr.e)));
                assert_eq!(prod, Ideal::principal_int(&k, p as i128), "{name} p={p}");
            }
        }
    }

    #[test]
    fn valuations() {
        let gi = catalog_field("Q(i)").unwrap();
        let two = &split_prime(&gi, 2).unwrap()[0];
        assert_eq!(two.valuation(&gi, &FieldElement(vec![2, 0])), Some(2));
        assert_eq!(two.valuation(&gi, &FieldElement(vec![1, 1])), Some(1));
        assert_eq!(two.valuation(&gi, &FieldElement(vec![3, 0])), Some(0));
    }

    #[test]
    fn ideal_counts_match_dirichlet_coefficients() {
        // Ideals of Z[i] with norm n number sum_{d | n} chi_{-4}(d).
        let gi = catalog_field("Q(i)").unwrap();
        let all = ideals_up_to_norm(&gi, 50).unwrap();
        for n in 1..=50u128 {
            let want: i32 = (1..=n).filter(|d| n % d == 0).map(|d| crate::arith::kronecker(-4, d as u64)).sum();
            assert_eq!(all.iter().filter(|a| a.norm() == n).count() as i32, want, "n={n}");
        }
    }
}
