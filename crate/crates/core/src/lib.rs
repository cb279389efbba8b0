//! Exact state-vector simulation of non-adiabatic pulse protocols on chains of
//! Rydberg atoms.
//!
//! The crate covers three protocols (antiferromagnetic GHZ preparation,
//! dimer-MPS preparation and single-qubit state transport), two gate backends
//! (the perfect-blockade constrained rotation and exact evolution under the
//! full van der Waals Hamiltonian), positional disorder, closed-form two-atom
//! results and the pieces needed for disorder-averaged fidelity sweeps.
//!
//! Everything here is `no_std` with `alloc`; file formats, threading and the
//! command line live in the `rydchain` crate.
//!
//! Conventions used throughout:
//!
//! * sites are numbered from 1, site 1 is the most significant digit of a
//!   basis index;
//! * level 0 is the ground state, level 1 the Rydberg state and level 2 the
//!   auxiliary hyperfine state of the three-level scheme;
//! * energies and Rabi frequencies are angular frequencies (rad/μs), lengths
//!   are in μm, times in μs;
//! * a pulse is parameterised by its rotation angle θ, with
//!   `exp(-iθσ_y)|0⟩ = cosθ|0⟩ + sinθ|1⟩`. A named π-pulse is θ = π/2 and a
//!   named π/2-pulse is θ = π/4. Under the realistic backend a pulse of angle
//!   θ driven at Rabi frequency Ω lasts `θ / (2Ω)` and couples the two levels
//!   with matrix element `2Ω`.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod analytics;
pub mod dynamics;
mod error;
pub mod lattice;
pub mod montecarlo;
pub mod protocols;
pub mod statekit;
pub mod targets;

pub use error::{Error, Result};
pub use num_complex::Complex64;
