//! Special functions, quadrature and root finding.
//!
//! Every integral in the crate goes through the adaptive Gauss–Kronrod engine
//! in [`quadrature`]; semi-infinite ranges are compactified with an algebraic
//! map, principal values are folded symmetrically about the pole and cosine
//! transforms are summed panel by panel over half periods.

mod bessel;
mod gamma;
mod oscillatory;
mod quadrature;
mod roots;

pub use bessel::{bessel_k, bessel_k_scaled};
pub use gamma::{gamma_fn, ln_gamma};
pub use oscillatory::{cosine_transform, cosine_transform_with};
pub use quadrature::{
    integrate, integrate_pv, integrate_semi_infinite, integrate_semi_infinite_with, integrate_with_breaks,
};
pub use roots::{find_root, RootOptions};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Convergence request for the quadrature routines.
///
/// A result is accepted when its error estimate is below
/// `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_evals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-10, abs: 1e-14, max_evals: 400_000 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        Tolerance { rel, abs, ..Tolerance::default() }.validated()
    }

    pub fn with_max_evals(self, max_evals: usize) -> Result<Self> {
        Tolerance { max_evals, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.rel > 0.0) || !(self.abs > 0.0) {
            return Err(Error::domain(format!("tolerances must be positive (rel = {}, abs = {})", self.rel, self.abs)));
        }
        if self.max_evals < 100 {
            return Err(Error::domain(format!("max_evals must be at least 100, got {}", self.max_evals)));
        }
        Ok(self)
    }

    /// Target absolute error for an integral of magnitude `value`.
    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}
