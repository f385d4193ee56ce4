//! Geometric-side ingredients of the trace formula for congruence quotients of
//! `SL2(R)^a x SL2(C)^b` coming from quaternion division algebras.
//!
//! The crate computes exactly where the objects are combinatorial (orbital
//! integrals on Bruhat–Tits trees, weight functions, lattice points) and with
//! controlled numerics elsewhere (spherical transforms, Dedekind zeta values,
//! covolumes), then assembles them into an explicit multiplicity bound.
//!
//! Module map:
//! - [`number_field`]: small-degree number fields, prime splitting, zeta
//!   enclosures, Minkowski embeddings, polycylinder enumeration.
//! - [`padic_local`]: splitting types of local traces, congruence indices,
//!   weight functions and their local integrals.
//! - [`bt_tree`]: exact orbital integrals of `K0(p^r)` / `K1(p^r)` by tree
//!   counting, with a matrix-action brute force as an oracle.
//! - [`arch_spherical`]: spherical functions, test functions and archimedean
//!   orbital integrals on `SL2(R)` and `SL2(C)`.
//! - [`trace_geometry`]: covolumes, conductors, per-trace bounds and the final
//!   report.
//! - [`verify`]: invariant suites behind `verify` and the acceptance run.
//! - [`cli`]: configuration and dispatch.

pub mod arch_spherical;
pub mod arith;
pub mod bt_tree;
pub mod cli;
pub mod interval;
pub mod number_field;
pub mod padic_local;
pub mod quad;
pub mod trace_geometry;
pub mod verify;

pub use interval::Interval;
