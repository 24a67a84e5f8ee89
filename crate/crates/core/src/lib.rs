//! Brownian motion of a mechanical resonator coupled to a structured bath.
//!
//! The bath is described by the spectral density
//! J_k(ω) = A_k ω³ [1 + (ω/Ω_R)²]^{k−3} ([`bath`]). From it the crate derives the
//! stiffness and mass renormalizations ([`renorm`]), the exact memory kernel
//! ([`memory`]), the nonlocal susceptibility ([`response`]), equilibrium
//! correlation functions ([`correlations`]) and the optomechanical readout
//! used to reconstruct the bath from data ([`spectroscopy`]).
//!
//! All routines accept any consistent unit system; the CLI works in reduced
//! units Ω_R = M = ħ = 1.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bath;
pub mod correlations;
pub mod error;
pub mod memory;
pub mod numerics;
pub mod renorm;
pub mod response;
pub mod spectroscopy;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
