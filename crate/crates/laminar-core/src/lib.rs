//! Combinatorial engine for laminar branched surfaces in two-bridge and
//! Montesinos knot/tangle exteriors.
//!
//! The layers build on each other:
//! - [`rational`]: exact slopes p/q, continued fractions, parity pairs.
//! - [`farey`]: the triangulated disk of minimal Farey paths to a slope.
//! - [`paths`]: channel-bearing paths on those disks, with validators,
//!   constructive builders, and a brute-force enumerator.
//! - [`complex`]: sink-marked 2-complexes (tubes, spheres, disks), local
//!   singular-point classification, and the unique mark extension.
//! - [`assembly`]: exterior cusped regions and full surface verdicts.
//! - [`classify`]: knot/tangle decision procedures and surgery filters.

pub mod assembly;
pub mod classify;
pub mod complex;
pub mod farey;
pub mod paths;
pub mod rational;
