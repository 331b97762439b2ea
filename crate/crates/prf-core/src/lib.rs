//! Analysis of synchrony in pairs of pulse-coupled phase oscillators.
//!
//! The central object is the phase response function (PRF) `g(phi, eps)`: the
//! instantaneous phase shift an oscillator at phase `phi` experiences when it
//! receives a pulse of strength `eps`. From a PRF the crate derives
//!
//! - the strobe map `F` of a symmetric two-oscillator network, obtained by
//!   sampling one oscillator's phase each time the other completes a cycle,
//! - the infinitesimal PRF, the linearization of `g` in the pulse strength,
//! - stability verdicts for the synchronous state, both from endpoint
//!   derivatives of `F` and from direct fixed-point iteration.
//!
//! The exact PRF of the quadratic integrate-and-fire neuron (theta neuron) is
//! built in, together with companion examples whose exact and linearized
//! responses disagree: maps whose infinitesimal PRF predicts attraction while
//! the exact map is neutral or repelling. `validate_prf` checks candidate
//! response functions against the PRF axioms before they are admitted to any
//! of the analyses, and the `expr` module parses and differentiates
//! user-supplied response functions symbolically.
//!
//! The crate is `no_std`-compatible: disable default features and enable
//! `libm` to build without the standard library (allocation is required).

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod builtins;
pub mod calculus;
pub mod classify;
pub mod error;
pub mod expr;
mod math;
pub mod phase;
pub mod prf;
pub mod strobe;
pub mod theta;

pub use error::Error;
pub use phase::{Phase, Strength};
pub use prf::{PhaseResponse, Provenance, ValidationReport};

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
