//! Supersymmetric quantum mechanics for Majorana fermions in 1+1 dimensions.
//!
//! In the Majorana representation the two spinor components are real and the
//! only admissible external coupling is a scalar potential `φ(x)`. The
//! first-order system
//!
//! ```text
//!  ħ ∂ₜψ₁ = A† ψ₂,    −ħ ∂ₜψ₂ = A ψ₁,    A = cħ∂ₓ + W,   A† = −cħ∂ₓ + W,
//! ```
//!
//! with superpotential `W = mc² + φ`, decouples into the partner problems
//! `H₋ = A†A` and `H₊ = AA†`. This crate provides:
//!
//! * [`model`]: physical parameters, grids, potentials and the coupling audit;
//! * [`expr`]: a small expression language for user-defined potentials;
//! * [`susy`]: ladder operators, partner potentials, zero modes, shape
//!   invariance and algebraic state hierarchies;
//! * [`oracle`]: a finite-difference discretization of `H±` with a
//!   self-contained symmetric tridiagonal eigensolver;
//! * [`linear`]: closed forms for the linear potential `φ = kx`;
//! * [`evolution`]: spinor assembly, densities, periods and a norm-preserving
//!   integrator for the first-order system.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
pub mod evolution;
pub mod expr;
pub mod linear;
pub mod model;
pub mod oracle;
pub mod susy;

pub use error::{Error, Result};
pub use model::{GridFunction, GridSpec, PhysicalParams, ScalarPotential, Sector};
