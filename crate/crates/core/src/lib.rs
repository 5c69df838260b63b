//! Numerics for spin-coherent states: how much entanglement a spin-coherent
//! state generates when sent through one arm of a beam splitter, how the
//! family approaches optical (Glauber) coherent states as the spin grows,
//! how well two spin-coherent states can be told apart, and the geometry of
//! their Majorana constellations.
//!
//! Conventions used throughout:
//!
//! - `ħ = 1`.
//! - Spins are carried as `two_s = 2S` so half-integers are exact
//!   ([`states::SpinMagnitude`]).
//! - Fock index `n` of a spin state is `m + S`; `|0⟩` is the extremal state
//!   with `⟨S_z⟩ = -S` and `|z⟩ ∝ exp(z̄ S₊)|0⟩`, i.e. amplitudes carry `z̄ⁿ`.
//! - Entropies are in nats.
//!
//! Modules, bottom-up:
//!
//! - [`numkit`]: log-space combinatorics, Hermitian spectra, SVD, polynomial
//!   roots, finite differences.
//! - [`states`]: spin-coherent, truncated Glauber and asymptotic families,
//!   overlaps, spin operators and rotations.
//! - [`beamsplitter`]: the two-mode output and its reduced density matrices.
//! - [`entanglement`]: entropies, sweeps, peak analysis, Glauber-limit overlap.
//! - [`helstrom`]: minimum-error discrimination of two pure states.
//! - [`majorana`]: constellations, circle and antipode geometry, metric and
//!   curvature of the coherent-state manifold.

#![forbid(unsafe_code)]

pub mod beamsplitter;
pub mod entanglement;
mod error;
pub mod format;
pub mod helstrom;
pub mod majorana;
pub mod numkit;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for operators and density matrices.
pub type CMatrix = nalgebra::DMatrix<C64>;
