//! Numerical core for simulating one quantum particle in three equivalent
//! representations and cross-checking them against each other:
//!
//! * a complex wavefunction evolved by the Schrödinger equation
//!   ([`schrodinger`]),
//! * a Madelung fluid described by the scalar fields `ξ = ln ρ` and the
//!   action `S`, evolved directly in hydrodynamic form, together with the
//!   complex combination `Ω = ξ/2 + iS/ħ` obeying a Burgers-like equation
//!   ([`madelung`]),
//! * a sampled phase-space ensemble of sub-particles ("monads") carrying the
//!   same density, velocity, and internal-energy fields ([`kinetics`]).
//!
//! [`diagnostics`] computes the derived fields and scalars that tie the
//! pictures together: the quantum potential, both stress-tensor closures and
//! their common conservative force, the electromagnetic-analogy fields, the
//! energy partition into classical and internal parts, the uncertainty
//! chain, and circulation quantization.
//!
//! The crate is `no_std` (with `alloc`); all floating-point transcendentals
//! come from `libm` via `num-traits`. Everything is pure and deterministic:
//! fields are immutable value snapshots, solvers are state-to-state
//! functions, and Monte-Carlo sampling uses a counter-based generator with
//! per-monad streams ([`rng`]).
//!
//! Internally every quantity is kept in the "total" convention (`ħ`, `m`,
//! `V`, densities normalized to one); the monad count `N` only enters when
//! converting to per-monad constants `η = ħ/N`, `μ = m/N` on demand, so all
//! reported diagnostics are invariant under `N`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod deriv;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod kinetics;
pub mod madelung;
pub mod params;
pub mod rng;
pub mod schrodinger;
pub mod stats;
pub mod transform;

pub use error::CoreError;
pub use field::{ComplexField, ScalarField, WaveField};
pub use grid::{Boundary, Grid};
pub use params::PhysicalParams;
pub use transform::{HydroState, OmegaField};

/// Shorthand used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Density floor below which `ξ = ln ρ` and the phase are not evaluated;
/// such nodes are flagged and diagnostics interpolate across them.
pub const RHO_FLOOR: f64 = 1e-30;
