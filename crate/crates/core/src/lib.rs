//! Numerical tools for ontological models of finite-dimensional quantum systems.
//!
//! The crate covers five layers:
//!
//! * [`hilbert`]: dense complex linear algebra (states, operators, Jacobi
//!   eigendecomposition, basis completion, stabilizer unitaries).
//! * [`constructions`] and [`povm`]: the state families whose overlaps are
//!   bounded, the anti-distinguishability criterion for triples, and
//!   anti-distinguishing / Helstrom measurements.
//! * [`ontomodel`]: finite ontological models with preparation, response and
//!   transformation sets, overlap measures and Born-rule audits.
//! * [`bounds`]: closed-form overlap bounds.
//! * [`overlap_lp`]: linear programs over vertex models that maximise
//!   overlaps subject to reproducing quantum statistics.

pub mod bounds;
pub mod config;
pub mod constructions;
mod error;
pub mod hilbert;
pub mod lp;
pub mod ontomodel;
pub mod overlap_lp;
pub mod povm;
pub mod scenario;

pub use config::{install_tolerances, tolerances, Tolerances};
pub use error::{Error, Result};
pub use hilbert::{Onb, Operator, StateVector, C64};
pub use povm::Povm;
pub use scenario::Scenario;
