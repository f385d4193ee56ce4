//! Exact counts from the shape of the fixed set.
//!
//! Every shape is a core (apartment, vertex or edge) with rooted `q`-ary
//! branches hanging off it, cut at a depth. All vertices of the same depth
//! are equivalent under automorphisms of the shape, so the counts reduce to
//! a dynamic programme over `(depth, last move)`.

use super::{FixedSetDescriptor, OrbitalCount, Parity, TreeError, TREE_BUDGET};
use crate::padic_local::SubgroupKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    Start,
    /// Along the core at depth 0.
    Core,
    Down,
    Up,
}

/// A shape: core vertices up to translation, how many core neighbours each
/// has, and the cut-off depth.
struct Shape {
    /// Parities of the core vertices in a fundamental domain.
    cores: Vec<Parity>,
    core_degree: u64,
    depth: u32,
    q: u64,
}

impl Shape {
    fn from_descriptor(q: u64, d: &FixedSetDescriptor) -> Self {
        match *d {
            // One even and one odd apartment vertex per period of the even shift.
            FixedSetDescriptor::TubeApartment { nu } => {
                Self { cores: vec![Parity::Even, Parity::Odd], core_degree: 2, depth: nu, q }
            }
            FixedSetDescriptor::BallVertex { nu, center } => Self { cores: vec![center], core_degree: 0, depth: nu, q },
            FixedSetDescriptor::BallEdge { radius, .. } => {
                Self { cores: vec![Parity::Even, Parity::Odd], core_degree: 1, depth: radius, q }
            }
        }
    }

    fn hanging(&self) -> u64 {
        self.q + 1 - self.core_degree
    }

    /// Vertices at depth `delta` above one core vertex.
    fn layer_size(&self, delta: u32) -> u128 {
        if delta == 0 {
            1
        } else {
            self.hanging() as u128 * (self.q as u128).pow(delta - 1)
        }
    }

    /// Non-backtracking walks of length `r` from a vertex at depth `start`
    /// that stay inside the shape.
    fn walks(&self, start: u32, r: u32) -> u128 {
        // states[d] = (count arriving by Start/Core, by Down, by Up)
        let mut cur: Vec<[u128; 4]> = vec![[0; 4]; self.depth as usize + 1];
        cur[start as usize][Move::Start as usize] = 1;
        let q = self.q as u128;
        for _ in 0..r {
            let mut next = vec![[0u128; 4]; self.depth as usize + 1];
            for (d, row) in cur.iter().enumerate() {
                for (m, &n) in row.iter().enumerate() {
                    if n == 0 {
                        continue;
                    }
                    let last = [Move::Start, Move::Core, Move::Down, Move::Up][m];
                    if d == 0 {
                        let core = self.core_degree as u128 - u128::from(last == Move::Core && self.core_degree > 0);
                        next[0][Move::Core as usize] += n * core;
                        if self.depth > 0 {
                            let down = self.hanging() as u128 - u128::from(last == Move::Up);
                            next[1][Move::Down as usize] += n * down;
                        }
                    } else {
                        if last != Move::Down {
                            next[d - 1][Move::Up as usize] += n;
                        }
                        if (d as u32) < self.depth {
                            let down = q - u128::from(last == Move::Up);
                            next[d + 1][Move::Down as usize] += n * down;
                        }
                    }
                }
            }
            cur = next;
        }
        cur.iter().flatten().sum()
    }
}

/// Exact count for `K_0` (`j = 0`: even-rooted paths of length `r`) or
/// `K_1` (`j = 1`: even vertices whose `r`-ball is fixed), modulo the shift
/// in the split case.
pub fn count_fixed_closed(q: u64, descriptor: &FixedSetDescriptor, r: u32, kind: SubgroupKind) -> Result<OrbitalCount, TreeError> {
    let shape = Shape::from_descriptor(q, descriptor);
    if (shape.depth as u64 + 1) * (r as u64 + 1) * 4 > TREE_BUDGET {
        return Err(TreeError::UnsupportedRadius { radius: shape.depth });
    }
    let mut count: u128 = 0;
    for &core in &shape.cores {
        for delta in 0..=shape.depth {
            if core.flip_by(delta) != Parity::Even {
                continue;
            }
            let n = shape.layer_size(delta);
            count += match kind {
                SubgroupKind::K0 => n * shape.walks(delta, r),
                SubgroupKind::K1 => {
                    if delta + r <= shape.depth {
                        n
                    } else {
                        0
                    }
                }
            };
        }
    }
    OrbitalCount::new(q, r, kind, count, descriptor.is_exact())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tube(nu: u32) -> FixedSetDescriptor {
        FixedSetDescriptor::TubeApartment { nu }
    }

    #[test]
    fn spec_examples() {
        assert_eq!(count_fixed_closed(2, &tube(1), 0, SubgroupKind::K0).unwrap().count, 2);
        let ball0 = FixedSetDescriptor::BallVertex { nu: 0, center: Parity::Even };
        for r in 0..5 {
            for kind in [SubgroupKind::K0, SubgroupKind::K1] {
                assert_eq!(count_fixed_closed(3, &ball0, r, kind).unwrap().count, u128::from(r == 0));
            }
        }
    }

    #[test]
    fn walk_counts_in_full_tree_region() {
        // Inside a ball of radius >= r around the start, every
        // non-backtracking walk stays; there are (q+1) q^{r-1} of them.
        let ball = FixedSetDescriptor::BallVertex { nu: 6, center: Parity::Even };
        let shape = Shape::from_descriptor(3, &ball);
        for r in 1..6 {
            assert_eq!(shape.walks(0, r), 4 * 3u128.pow(r - 1));
        }
    }

    #[test]
    fn edge_ball_of_radius_zero_is_an_edge() {
        let e = FixedSetDescriptor::BallEdge { radius: 0, exact: true };
        assert_eq!(count_fixed_closed(5, &e, 0, SubgroupKind::K0).unwrap().count, 1);
        assert_eq!(count_fixed_closed(5, &e, 1, SubgroupKind::K0).unwrap().count, 1);
        assert_eq!(count_fixed_closed(5, &e, 2, SubgroupKind::K0).unwrap().count, 0);
        assert_eq!(count_fixed_closed(5, &e, 0, SubgroupKind::K1).unwrap().count, 1);
        assert_eq!(count_fixed_closed(5, &e, 1, SubgroupKind::K1).unwrap().count, 0);
    }

    #[test]
    fn k1_count_in_a_tube() {
        // Even vertices with depth <= nu - r modulo the shift: one per layer
        // parity class.
        let c = count_fixed_closed(2, &tube(2), 1, SubgroupKind::K1).unwrap();
        // depth 0: a0 (even); depth 1 above a1: 1 vertex (q-1 = 1), even.
        assert_eq!(c.count, 2);
    }
}
