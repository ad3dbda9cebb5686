//! Numerical tolerances shared by every module.
//!
//! A single [`Tolerances`] record holds all thresholds. Library code reads the
//! process-wide record through [`tolerances`]; a front end may install an
//! override once, before the first read, with [`install_tolerances`].

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed deviation of a state's squared norm from 1.
    pub normalization: f64,
    /// Allowed pairwise inner product in an orthonormal family.
    pub orthonormality: f64,
    /// Allowed Frobenius norm of `H - H^dagger`.
    pub hermiticity: f64,
    /// Jacobi stops once the off-diagonal norm falls below this (relative to `max(1, |H|_F)`).
    pub eig_off_diagonal: f64,
    pub eig_max_sweeps: usize,
    /// Smallest eigenvalue accepted for a positive semidefinite element.
    pub psd: f64,
    /// Allowed Frobenius distance of the summed POVM elements from the identity.
    pub povm_completeness: f64,
    /// Residual allowed for unitarity and the action of a stabilizer unitary.
    pub stabilizer: f64,
    /// Norm under which the orthogonal part of a vector is treated as zero.
    pub degenerate: f64,
    /// Two states are equal when `|<a|b>|^2` is within this of 1.
    pub state_equality: f64,
    /// Weights at or below this are outside a distribution's support.
    pub support: f64,
    /// Allowed deviation of a distribution (or a stochastic column) from unit sum.
    pub distribution_sum: f64,
    /// Allowed deviation of a Born row sum from 1.
    pub born_row: f64,
    /// Phase-one objective below which a linear program is declared feasible.
    pub lp_feasibility: f64,
    /// Constraint residual accepted in a returned LP solution.
    pub lp_residual: f64,
    /// A vertex is usable for a state when some reproducing distribution gives it at least this weight.
    pub usable_vertex: f64,
    /// Largest vertex space that will be enumerated.
    pub vertex_limit: usize,
    /// Residual of the epistemic-superposition test.
    pub epistemic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            normalization: 1e-9,
            orthonormality: 1e-9,
            hermiticity: 1e-9,
            eig_off_diagonal: 1e-12,
            eig_max_sweeps: 100,
            psd: 1e-9,
            povm_completeness: 1e-8,
            stabilizer: 1e-8,
            degenerate: 1e-10,
            state_equality: 1e-8,
            support: 1e-12,
            distribution_sum: 1e-12,
            born_row: 1e-9,
            lp_feasibility: 1e-9,
            lp_residual: 1e-7,
            usable_vertex: 1e-9,
            vertex_limit: 1_000_000,
            epistemic: 1e-9,
        }
    }
}

impl Tolerances {
    /// Applies `name -> value` overrides on top of `self`.
    pub fn with_overrides(&self, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        let mut value = serde_json::to_value(self).map_err(|e| Error::Format(e.to_string()))?;
        let map = value.as_object_mut().expect("tolerances serialize to an object");
        for (name, v) in overrides {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidTolerance(name.clone()));
            }
            let slot = map
                .get_mut(name)
                .ok_or_else(|| Error::InvalidTolerance(name.clone()))?;
            *slot = if slot.is_u64() {
                serde_json::Value::from(v.round() as u64)
            } else {
                serde_json::Value::from(*v)
            };
        }
        serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))
    }
}

static ACTIVE: OnceLock<Tolerances> = OnceLock::new();

/// The tolerances in force for this process.
pub fn tolerances() -> &'static Tolerances {
    ACTIVE.get_or_init(Tolerances::default)
}

/// Installs process-wide tolerances. Fails if tolerances were already read or installed.
pub fn install_tolerances(tol: Tolerances) -> Result<()> {
    ACTIVE
        .set(tol)
        .map_err(|_| Error::InvalidTolerance("tolerances already initialised".into()))
}
