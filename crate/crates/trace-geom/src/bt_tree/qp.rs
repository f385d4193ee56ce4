//! p-adic numbers with a fixed relative-precision cap and honest precision
//! tracking. A value is `p^val * unit` with the unit known modulo `p^rel`;
//! `rel = 0` means the value is only known to lie in `p^val Z_p`.

use crate::arith::{inv_mod, mul_mod, rem};
use std::fmt;

/// Largest `n` with `p^n < 2^62`, so products of residues fit in `u128`.
pub fn max_digits(p: u64) -> u32 {
    let mut n = 0;
    let mut acc: u64 = 1;
    while let Some(next) = acc.checked_mul(p) {
        if next >= 1 << 62 {
            break;
        }
        acc = next;
        n += 1;
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Qp {
    p: u64,
    val: i64,
    unit: u64,
    rel: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionLoss(pub String);

impl fmt::Display for PrecisionLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Qp {
    /// An integer, exact up to the precision cap.
    pub fn from_int(p: u64, n: i128) -> Self {
        let cap = max_digits(p);
        if n == 0 {
            return Self::zero_mod(p, cap as i64 * 4);
        }
        let mut n = n;
        let mut val = 0;
        while n % p as i128 == 0 {
            n /= p as i128;
            val += 1;
        }
        let m = p.pow(cap);
        Self { p, val, unit: rem(n, m), rel: cap }
    }

    /// `num / den` for nonzero `den`.
    pub fn ratio(p: u64, num: i128, den: i128) -> Self {
        Self::from_int(p, num).div(&Self::from_int(p, den)).expect("nonzero exact denominator")
    }

    /// An element of `p^abs Z_p` with nothing else known.
    pub fn zero_mod(p: u64, abs: i64) -> Self {
        Self { p, val: abs, unit: 0, rel: 0 }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Whether the value is certified nonzero.
    pub fn is_certain(&self) -> bool {
        self.rel > 0
    }

    /// Certified valuation, if nonzero.
    pub fn valuation(&self) -> Option<i64> {
        self.is_certain().then_some(self.val)
    }

    /// The valuation is at least this.
    pub fn min_valuation(&self) -> i64 {
        self.val
    }

    /// Absolute precision: the value is known modulo `p^abs`.
    pub fn abs_precision(&self) -> i64 {
        self.val + self.rel as i64
    }

    pub fn neg(&self) -> Self {
        if self.rel == 0 {
            return *self;
        }
        let m = self.p.pow(self.rel);
        Self { unit: (m - self.unit) % m, ..*self }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let val = self.val + o.val;
        if self.rel == 0 || o.rel == 0 {
            // A product with an uncertain zero is only known up to its
            // leading valuation.
            return Self::zero_mod(self.p, val);
        }
        let rel = self.rel.min(o.rel);
        let m = self.p.pow(rel);
        Self { p: self.p, val, unit: mul_mod(self.unit % m, o.unit % m, m), rel }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p;
        let abs = self.abs_precision().min(o.abs_precision());
        let m = self.val.min(o.val);
        if abs <= m {
            return Self::zero_mod(p, abs);
        }
        // Digits from p^m to p^abs, capped to what fits.
        let span = ((abs - m) as u32).min(max_digits(p));
        let abs = m + span as i64;
        let modulus = p.pow(span);
        let lift = |x: &Self| -> u64 {
            if x.rel == 0 {
                return 0;
            }
            let shift = (x.val - m) as u32;
            if shift >= span {
                return 0;
            }
            mul_mod(x.unit % modulus, p.pow(shift), modulus)
        };
        let mut s = (lift(self) as u128 + lift(o) as u128) as u64 % modulus;
        if s == 0 {
            return Self::zero_mod(p, abs);
        }
        let mut v = 0u32;
        while s.is_multiple_of(p) {
            s /= p;
            v += 1;
        }
        Self { p, val: m + v as i64, unit: s, rel: span - v }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn inv(&self) -> Result<Self, PrecisionLoss> {
        if self.rel == 0 {
            return Err(PrecisionLoss(format!("division by an element of p^{} Z_p not known to be nonzero", self.val)));
        }
        let m = self.p.pow(self.rel);
        let unit = inv_mod(self.unit, m).expect("units are invertible");
        Ok(Self { p: self.p, val: -self.val, unit, rel: self.rel })
    }

    pub fn div(&self, o: &Self) -> Result<Self, PrecisionLoss> {
        Ok(self.mul(&o.inv()?))
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { val: self.val + k, ..*self }
    }

    /// The class in `Q_p / p^n Z_p`, as `(num, den_exp)` meaning
    /// `num / p^den_exp` with `0 <= num < p^(n + den_exp)`. Requires absolute
    /// precision at least `n`.
    pub fn residue_mod(&self, n: i64) -> Result<(u64, u32), PrecisionLoss> {
        if self.val >= n {
            return Ok((0, 0));
        }
        if self.abs_precision() < n {
            return Err(PrecisionLoss(format!(
                "value known mod p^{} but needed mod p^{n}",
                self.abs_precision()
            )));
        }
        let den_exp = (-self.val).max(0) as u32;
        let digits = (n + den_exp as i64) as u32;
        let shift = (self.val + den_exp as i64) as u32;
        let keep = digits - shift;
        let m = self.p.pow(keep);
        let num = (self.unit % m) * self.p.pow(shift);
        Ok((num, den_exp))
    }
}
