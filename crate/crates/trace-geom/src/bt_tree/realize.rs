//! Integral matrices realizing a prescribed local type, for the brute-force
//! oracle.

use super::TreeError;
use crate::arith::{inv_mod, rem};
use crate::padic_local::{classify_splitting, HalfInt, SplittingType, TraceResidue};
use rand::Rng;
use serde::Serialize;

/// A 2x2 integer matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntMatrix(pub [[i128; 2]; 2]);

impl IntMatrix {
    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (self.0, o.0);
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Self([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn det(&self) -> i128 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> i128 {
        self.0[0][0] + self.0[1][1]
    }

    /// Adjugate; the inverse when the determinant is 1.
    pub fn adjugate(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Self([[d, -b], [-c, a]])
    }

    /// The companion matrix `(0, -1; 1, x)` of `X^2 - xX + 1`.
    pub fn companion(x: i128) -> Self {
        Self([[0, -1], [1, x]])
    }

    /// A random element of `SL2(Z)` as a product of elementary matrices
    /// with entries in `[-3, 3]`.
    pub fn random_sl2<R: Rng>(rng: &mut R, factors: usize) -> Self {
        let mut g = Self([[1, 0], [0, 1]]);
        for i in 0..factors {
            let k: i128 = rng.gen_range(-3..=3);
            let e = if i % 2 == 0 { Self([[1, k], [0, 1]]) } else { Self([[1, 0], [k, 1]]) };
            g = g.mul(&e);
        }
        g
    }
}

/// Matrices in `SL2(Z)` with a common trace of the requested type.
#[derive(Debug, Clone, Serialize)]
pub struct Realization {
    pub trace: i128,
    /// The companion matrix, then (when it exists) an Iwahori-type pair
    /// conjugate under `diag(p, 1)`, whose fixed sets have opposite parity.
    pub matrices: Vec<IntMatrix>,
}

/// Smallest nonnegative integer trace of the given type and `nu` over `Q_p`.
pub fn find_trace(p: u64, kind: SplittingType, nu: HalfInt) -> Option<i128> {
    let limit = 4 * (p as i128).pow(nu.twice() + 4);
    (0..=limit).find(|&x| {
        x != 2
            && classify_splitting(p, p, TraceResidue::exact(x))
                .map(|g| g.kind == kind && g.nu == nu)
                .unwrap_or(false)
    })
}

pub fn realize_gamma(p: u64, kind: SplittingType, nu: HalfInt) -> Result<Realization, TreeError> {
    let trace = find_trace(p, kind, nu).ok_or(TreeError::Unrealizable { p, kind: kind.label(), nu: nu.to_string() })?;
    let mut matrices = vec![IntMatrix::companion(trace)];
    if nu.twice() >= 2 && (p != 2 || trace % 2 == 0) {
        // a = x/2 mod p makes a(x - a) = x^2/4 = 1 mod p since p | x^2 - 4.
        let pi = p as i128;
        let a = if p == 2 { trace / 2 } else { rem(trace * inv_mod(2, p).unwrap() as i128, p) as i128 };
        let num = a * (trace - a) - 1;
        if num % pi == 0 {
            let b = num / pi;
            let lower = IntMatrix([[a, b], [pi, trace - a]]);
            let upper = IntMatrix([[a, pi * b], [1, trace - a]]);
            debug_assert_eq!(lower.det(), 1);
            debug_assert_eq!(upper.det(), 1);
            matrices.push(lower);
            matrices.push(upper);
        }
    }
    Ok(Realization { trace, matrices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn traces_have_the_requested_type() {
        // 7^2 - 4 = 9 * 5 with 5 a nonresidue mod 3.
        assert_eq!(find_trace(3, SplittingType::EllipticUnramified, HalfInt(2)), Some(7));
        assert_eq!(find_trace(2, SplittingType::Split, HalfInt(2)), None);
        let r = realize_gamma(5, SplittingType::EllipticUnramified, HalfInt(2)).unwrap();
        for m in &r.matrices {
            assert_eq!((m.det(), m.trace()), (1, r.trace));
        }
        assert_eq!(r.matrices.len(), 3);
    }

    #[test]
    fn random_elements_are_unimodular() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert_eq!(IntMatrix::random_sl2(&mut rng, 4).det(), 1);
        }
    }
}
