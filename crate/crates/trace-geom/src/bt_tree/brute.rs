//! Brute-force counts by acting with an explicit matrix on lattice classes.

use super::qp::{max_digits, Qp};
use super::realize::IntMatrix;
use super::{FixedSetDescriptor, OrbitalCount, Parity, TreeError, TREE_BUDGET};
use crate::arith::{inv_mod, mul_mod, sqrt_mod_prime};
use crate::padic_local::{classify_splitting, SplittingType, SubgroupKind, TraceResidue};
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};

/// A vertex as the class of the lattice spanned by the columns of
/// `(p^a, c; 0, p^b)`, with `0 <= c < p^a` and not all of `p^a, c, p^b`
/// divisible by `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TreeVertex {
    pub a: u32,
    pub b: u32,
    pub c: u64,
}

impl TreeVertex {
    pub const ORIGIN: Self = Self { a: 0, b: 0, c: 0 };

    /// Distance to the standard vertex `Z_p^2`.
    pub fn depth(&self) -> u32 {
        self.a + self.b
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.a as i64 - self.b as i64)
    }

    /// The class of `(p^n, c; 0, 1)`; only `c mod p^n` matters.
    fn from_iwasawa(n: i64, c: &Qp) -> Result<Self, TreeError> {
        let (num, den) = c.residue_mod(n).map_err(|e| TreeError::PrecisionExhausted(e.0))?;
        if num == 0 {
            return Ok(if n >= 0 {
                Self { a: n as u32, b: 0, c: 0 }
            } else {
                Self { a: 0, b: (-n) as u32, c: 0 }
            });
        }
        Ok(Self { a: (n + den as i64) as u32, b: den, c: num })
    }

    fn to_iwasawa(self, p: u64) -> (i64, Qp) {
        let c = Qp::from_int(p, self.c as i128).shift(-(self.b as i64));
        (self.a as i64 - self.b as i64, c)
    }

    pub fn neighbors(self, p: u64) -> Result<Vec<Self>, TreeError> {
        let (n, c) = self.to_iwasawa(p);
        let mut out = Vec::with_capacity(p as usize + 1);
        for t in 0..p {
            let step = Qp::from_int(p, t as i128).shift(n);
            out.push(Self::from_iwasawa(n + 1, &c.add(&step))?);
        }
        out.push(Self::from_iwasawa(n - 1, &c)?);
        Ok(out)
    }
}

/// A 2x2 matrix over `Q_p` acting on vertices.
#[derive(Debug, Clone, Copy)]
struct QpMatrix([[Qp; 2]; 2]);

impl QpMatrix {
    fn from_int(p: u64, m: &IntMatrix) -> Self {
        let e = |i: usize, j: usize| Qp::from_int(p, m.0[i][j]);
        Self([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    /// Image of a vertex. The matrix must have unit determinant.
    fn act(&self, v: TreeVertex, p: u64) -> Result<TreeVertex, TreeError> {
        let (n, c) = v.to_iwasawa(p);
        let [[g11, g12], [g21, g22]] = self.0;
        let m11 = g11.shift(n);
        let m12 = g11.mul(&c).add(&g12);
        let m21 = g21.shift(n);
        let m22 = g21.mul(&c).add(&g22);
        // Pivot on the bottom entry of smaller valuation.
        let lower_pivot = match (m21.valuation(), m22.valuation()) {
            (_, Some(v22)) if m21.min_valuation() >= v22 => false,
            (Some(v21), _) if m22.min_valuation() > v21 => true,
            _ => {
                return Err(TreeError::PrecisionExhausted(format!(
                    "cannot order valuations of the bottom row at vertex {v:?}"
                )))
            }
        };
        let lost = |e: super::qp::PrecisionLoss| TreeError::PrecisionExhausted(e.0);
        let (top, pivot) = if lower_pivot { (m11, m21) } else { (m12, m22) };
        let vp = pivot.valuation().expect("pivot is certain");
        TreeVertex::from_iwasawa(n - 2 * vp, &top.div(&pivot).map_err(lost)?)
    }

    /// Inverse of a determinant-one matrix.
    fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Self([[d, b.neg()], [c.neg(), a]])
    }
}

/// Shift generator of the centralizer of a split `gamma`: the element
/// `a + b gamma` with eigenvalues `p` and `1/p`, translating the apartment
/// of `gamma` by two steps.
fn shift_element(p: u64, gamma: &IntMatrix) -> Result<QpMatrix, TreeError> {
    let x = gamma.trace();
    let disc = x * x - 4;
    let v = crate::arith::valuation(p, disc).expect("regular");
    let unit = disc / (p as i128).pow(v);
    let digits = max_digits(p);
    let (root, rel) = hensel_sqrt(p, unit, digits)
        .ok_or_else(|| TreeError::PrecisionExhausted("discriminant is not a square".into()))?;
    let pi = p as i128;
    let sqrt_disc = Qp::from_int(p, root as i128).shift((v / 2) as i64);
    let sqrt_disc = truncate(sqrt_disc, rel);
    let lost = |e: super::qp::PrecisionLoss| TreeError::PrecisionExhausted(e.0);
    // b = (p - 1/p) / sqrt(Delta), a = ((p + 1/p) - b x) / 2.
    let b = Qp::ratio(p, pi * pi - 1, pi).div(&sqrt_disc).map_err(lost)?;
    let a = Qp::ratio(p, pi * pi + 1, pi)
        .sub(&b.mul(&Qp::from_int(p, x)))
        .div(&Qp::from_int(p, 2))
        .map_err(lost)?;
    let g = QpMatrix::from_int(p, gamma).0;
    let e = |i: usize, j: usize| {
        let diag = if i == j { a } else { Qp::zero_mod(p, i64::MAX / 4) };
        diag.add(&b.mul(&g[i][j]))
    };
    Ok(QpMatrix([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]))
}

/// Keep only `rel` digits of relative precision.
fn truncate(x: Qp, rel: u32) -> Qp {
    x.add(&Qp::zero_mod(x.p(), x.min_valuation() + rel as i64))
}

/// Square root of a p-adic unit `u` modulo `p^digits`; returns the root and
/// the number of correct digits.
fn hensel_sqrt(p: u64, u: i128, digits: u32) -> Option<(u64, u32)> {
    let m = p.pow(digits);
    let u = crate::arith::rem(u, m);
    if p == 2 {
        if u % 8 != 1 {
            return None;
        }
        let mut r: u64 = 1;
        for k in 3..digits {
            // r^2 = u mod 2^k; fix bit k-1 so that it holds mod 2^(k+1).
            let mk = 1u64 << (k + 1);
            if mul_mod(r, r, mk) != u % mk {
                r += 1 << (k - 1);
            }
        }
        return Some((r, digits - 2));
    }
    let mut r = sqrt_mod_prime(u % p, p)?;
    let mut prec = 1;
    while prec < digits {
        prec = (2 * prec).min(digits);
        let mk = p.pow(prec);
        let r2 = mul_mod(r, r, mk);
        let diff = (r2 + mk - u % mk) % mk;
        let inv = inv_mod(2 * r % mk, mk)?;
        r = (r + mk - mul_mod(diff, inv, mk)) % mk;
    }
    Some((r, digits))
}

#[derive(Debug, Clone, Serialize)]
pub struct BruteForceReport {
    pub count: OrbitalCount,
    pub truncation_radius: u32,
    /// Fixed vertices found within the truncation ball.
    pub fixed_vertices: usize,
    /// Shape read off the fixed set (elliptic) or the tube depth (split).
    pub descriptor: FixedSetDescriptor,
}

struct FixedSet {
    p: u64,
    gamma: QpMatrix,
    memo: HashMap<TreeVertex, bool>,
}

impl FixedSet {
    fn is_fixed(&mut self, v: TreeVertex) -> Result<bool, TreeError> {
        if let Some(&f) = self.memo.get(&v) {
            return Ok(f);
        }
        if self.memo.len() as u64 > TREE_BUDGET {
            return Err(TreeError::UnsupportedRadius { radius: v.depth() });
        }
        let f = self.gamma.act(v, self.p)? == v;
        self.memo.insert(v, f);
        Ok(f)
    }

    fn fixed_neighbors(&mut self, v: TreeVertex) -> Result<Vec<TreeVertex>, TreeError> {
        let mut out = Vec::new();
        for w in v.neighbors(self.p)? {
            if self.is_fixed(w)? {
                out.push(w);
            }
        }
        Ok(out)
    }

    /// Fixed vertices at distance exactly `r` from `y` (distances in the
    /// fixed subtree agree with the tree metric by convexity).
    fn sphere_count(&mut self, y: TreeVertex, r: u32) -> Result<u128, TreeError> {
        let mut frontier = vec![(y, None::<TreeVertex>)];
        for _ in 0..r {
            let mut next = Vec::new();
            for (v, from) in frontier {
                for w in self.fixed_neighbors(v)? {
                    if Some(w) != from {
                        next.push((w, Some(v)));
                    }
                }
            }
            frontier = next;
        }
        Ok(frontier.len() as u128)
    }

    /// Whether every vertex within `r` of `y` is fixed.
    fn ball_fixed(&mut self, y: TreeVertex, r: u32) -> Result<bool, TreeError> {
        let mut frontier = vec![(y, None::<TreeVertex>)];
        for _ in 0..r {
            let mut next = Vec::new();
            for (v, from) in frontier {
                for w in v.neighbors(self.p)? {
                    if Some(w) == from {
                        continue;
                    }
                    if !self.is_fixed(w)? {
                        return Ok(false);
                    }
                    next.push((w, Some(v)));
                }
            }
            frontier = next;
        }
        Ok(true)
    }
}

/// Count the configurations of [`super::count_fixed_closed`] by direct
/// action of `gamma` (in `SL2(Z)`) on all vertices within `truncation` of
/// the standard vertex.
pub fn count_fixed_bruteforce(
    q: u64,
    gamma: &IntMatrix,
    r: u32,
    kind: SubgroupKind,
    truncation: u32,
) -> Result<BruteForceReport, TreeError> {
    let p = q;
    if gamma.det() != 1 {
        return Err(TreeError::PrecisionExhausted(format!("determinant {} is not 1", gamma.det())));
    }
    let local = classify_splitting(q, p, TraceResidue::exact(gamma.trace()))?;
    let nu = local.nu;
    if truncation < nu.floor() + r + 1 {
        return Err(TreeError::TruncationTooSmall { radius: truncation });
    }
    let mut fixed = FixedSet { p, gamma: QpMatrix::from_int(p, gamma), memo: HashMap::new() };
    if !fixed.is_fixed(TreeVertex::ORIGIN)? {
        return Err(TreeError::PrecisionExhausted("gamma does not fix the standard vertex".into()));
    }
    // Fixed vertices within the truncation ball, by breadth-first search.
    let mut seen: HashSet<TreeVertex> = HashSet::from([TreeVertex::ORIGIN]);
    let mut order = vec![TreeVertex::ORIGIN];
    let mut queue = VecDeque::from([TreeVertex::ORIGIN]);
    let mut touches_boundary = false;
    while let Some(v) = queue.pop_front() {
        if v.depth() == truncation {
            touches_boundary = true;
            continue;
        }
        for w in fixed.fixed_neighbors(v)? {
            if seen.insert(w) {
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    let split = local.kind == SplittingType::Split;
    if !split && touches_boundary {
        return Err(TreeError::TruncationTooSmall { radius: truncation });
    }
    let shift = if split { Some(shift_element(p, gamma)?) } else { None };
    let is_representative = |v: TreeVertex, fixed: &mut FixedSet| -> Result<bool, TreeError> {
        let Some(lambda) = shift else { return Ok(true) };
        let key = |w: TreeVertex| (w.depth(), w);
        for g in [lambda, lambda.inverse()] {
            let mut w = v;
            for _ in 0..=2 * truncation + 2 {
                w = g.act(w, fixed.p)?;
                if w.depth() > truncation {
                    break;
                }
                if key(w) < key(v) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    let mut count: u128 = 0;
    for &y in &order {
        if y.parity() != Parity::Even || !is_representative(y, &mut fixed)? {
            continue;
        }
        if y.depth() + r > truncation {
            return Err(TreeError::TruncationTooSmall { radius: truncation });
        }
        count += match kind {
            SubgroupKind::K0 => fixed.sphere_count(y, r)?,
            SubgroupKind::K1 => u128::from(fixed.ball_fixed(y, r)?),
        };
    }
    let descriptor = if split {
        FixedSetDescriptor::TubeApartment { nu: nu.floor() }
    } else {
        infer_ball(&order, &mut fixed, local.kind)?
    };
    let exact = local.kind != SplittingType::EllipticRamifiedWild;
    Ok(BruteForceReport {
        count: OrbitalCount::new(q, r, kind, count, exact)?,
        truncation_radius: truncation,
        fixed_vertices: order.len(),
        descriptor,
    })
}

/// Read the centre and radius off a finite fixed set.
fn infer_ball(vertices: &[TreeVertex], fixed: &mut FixedSet, kind: SplittingType) -> Result<FixedSetDescriptor, TreeError> {
    let mut best: Vec<(u32, TreeVertex)> = Vec::new();
    for &v in vertices {
        // Eccentricity inside the fixed set.
        let mut seen = HashSet::from([v]);
        let mut layer = vec![v];
        let mut ecc = 0;
        loop {
            let mut next = Vec::new();
            for &u in &layer {
                for w in fixed.fixed_neighbors(u)? {
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            ecc += 1;
            layer = next;
        }
        best.push((ecc, v));
    }
    let min = best.iter().map(|b| b.0).min().unwrap_or(0);
    let centers: Vec<TreeVertex> = best.iter().filter(|b| b.0 == min).map(|b| b.1).collect();
    Ok(if centers.len() == 1 {
        FixedSetDescriptor::BallVertex { nu: min, center: centers[0].parity() }
    } else {
        // Two adjacent centres: an edge ball of radius ecc - 1.
        FixedSetDescriptor::BallEdge { radius: min - 1, exact: kind != SplittingType::EllipticRamifiedWild }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_round_trips() {
        for p in [2u64, 3, 5] {
            let mut layer = vec![TreeVertex::ORIGIN];
            let mut all = HashSet::from([TreeVertex::ORIGIN]);
            for depth in 1..=4u32 {
                let mut next = Vec::new();
                for v in &layer {
                    let nb = v.neighbors(p).unwrap();
                    assert_eq!(nb.len(), p as usize + 1);
                    for w in nb {
                        assert_ne!(w.parity(), v.parity());
                        let (n, c) = w.to_iwasawa(p);
                        assert_eq!(TreeVertex::from_iwasawa(n, &c).unwrap(), w);
                        if all.insert(w) {
                            assert_eq!(w.depth(), depth);
                            next.push(w);
                        }
                    }
                }
                layer = next;
            }
            // Ball of radius 4 in a (p+1)-regular tree.
            let expect = 1 + (p + 1) * (p.pow(4) - 1) / (p - 1);
            assert_eq!(all.len() as u64, expect);
        }
    }

    #[test]
    fn hensel_roots_square_back() {
        for (p, u) in [(3u64, 7i128), (5, 11), (2, 17), (2, -7)] {
            let (r, rel) = hensel_sqrt(p, u, 20).unwrap();
            let m = p.pow(rel);
            assert_eq!(mul_mod(r, r, m), crate::arith::rem(u, m));
        }
    }

    #[test]
    fn shift_element_has_unit_determinant_and_commutes() {
        // 11^2 - 4 = 9 * 13 with 13 a square mod 3: split over Q_3.
        let gamma = IntMatrix::companion(11);
        let lam = shift_element(3, &gamma).unwrap();
        let [[a, b], [c, d]] = lam.0;
        let det = a.mul(&d).sub(&b.mul(&c)).sub(&Qp::from_int(3, 1));
        assert!(det.min_valuation() >= 10);
        // The shift moves the origin by an even distance.
        let w = lam.act(TreeVertex::ORIGIN, 3).unwrap();
        assert_eq!(w.parity(), Parity::Even);
        assert!(w.depth() >= 2);
    }

    #[test]
    fn split_example_over_q2() {
        // Integral split traces over Q_2 have nu >= 3.
        let x = super::super::realize::find_trace(2, SplittingType::Split, crate::padic_local::HalfInt(6)).unwrap();
        let rep = count_fixed_bruteforce(2, &IntMatrix::companion(x), 0, SubgroupKind::K0, 8).unwrap();
        let closed = super::super::count_fixed_closed(2, &rep.descriptor, 0, SubgroupKind::K0).unwrap();
        assert_eq!(rep.count.count, closed.count);
    }
}
