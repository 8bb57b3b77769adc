//! Exact computations for rational blowdowns of 4-manifolds.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: intersection lattices, classes, the plumbing configuration `C_p`
//!   and its relative homology.
//! * [`moduli`]: dimensions of reducible moduli on `C_p` and exhaustive checks of
//!   the lattice-minimisation lemmas.
//! * [`exppoly`]: finite exponential sums `Σ a_s e^{κ_s}` (Donaldson kernels).
//! * [`transform`]: blowup, log transform and rational blowdown of kernels.
//! * [`swinv`]: Seiberg–Witten class maps, their transforms and the comparison
//!   with Donaldson kernels.
//! * [`catalog`]: named manifolds, built by closed formulas and by transform
//!   pipelines.
//!
//! All scalars are exact rationals; nothing in the crate uses floating point.

pub mod catalog;
pub mod error;
pub mod exppoly;
pub mod lattice;
pub mod moduli;
pub mod rational;
pub mod swinv;
pub mod transform;

pub use catalog::{parse_spec, ManifoldSpec};
pub use error::{Error, Result};
pub use exppoly::{ExpKernel, Parity};
pub use lattice::{pairing, ConfigCp, HClass, IntersectionLattice, QClass, RelClassCp, Zmod};
pub use rational::{Matrix, Rational};
pub use swinv::SWMap;
pub use transform::{BlowdownResult, ManifoldSeries};
