//! Prepare-and-measure scenarios: labelled states and measurements, the Born
//! table a model must reproduce, and a noise level.

use serde::{Deserialize, Deserializer, Serialize};

use crate::config::tolerances;
use crate::constructions::{born_table, BornTable};
use crate::error::{Error, Result};
use crate::hilbert::{Operator, StateVector};
use crate::povm::Povm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledState {
    pub label: String,
    pub state: StateVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledMeasurement {
    pub label: String,
    pub povm: Povm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledUnitary {
    pub label: String,
    pub operator: Operator,
}

/// A unitary that fixes state `fixed` and maps state `from` onto state `to`.
///
/// When preparations are noncontextual with respect to such unitaries, the
/// preparation of `fixed` is left unchanged by the transformation while the
/// preparation of `from` becomes a preparation of `to`, so any overlap with
/// `fixed` can only grow from `from` to `to`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerLink {
    pub fixed: String,
    pub from: String,
    pub to: String,
    /// Label of the witnessing unitary in [`Scenario::unitaries`], if recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    states: Vec<LabeledState>,
    measurements: Vec<LabeledMeasurement>,
    born: BornTable,
    epsilon: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    unitaries: Vec<LabeledUnitary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    links: Vec<StabilizerLink>,
    /// State labels forming an orthonormal basis, for superposition tests.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    basis: Vec<String>,
}

impl Scenario {
    /// Builds a scenario whose Born table is computed from the states and measurements.
    pub fn new(states: Vec<LabeledState>, measurements: Vec<LabeledMeasurement>, epsilon: f64) -> Result<Self> {
        let raw: Vec<StateVector> = states.iter().map(|s| s.state.clone()).collect();
        let povms: Vec<Povm> = measurements.iter().map(|m| m.povm.clone()).collect();
        let born = born_table(&raw, &povms)?;
        Self::with_born(states, measurements, born, epsilon)
    }

    /// Builds a scenario with a declared Born table, which must agree with the
    /// computed one within the Born-row tolerance. Declaring exact values keeps
    /// audits free of rounding noise.
    pub fn with_born(
        states: Vec<LabeledState>,
        measurements: Vec<LabeledMeasurement>,
        born: BornTable,
        epsilon: f64,
    ) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::OutOfRange { name: "epsilon", value: epsilon });
        }
        unique(states.iter().map(|s| s.label.as_str()), "state")?;
        unique(measurements.iter().map(|m| m.label.as_str()), "measurement")?;
        if let Some(first) = states.first() {
            let d = first.state.dim();
            for s in &states {
                if s.state.dim() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: s.state.dim() });
                }
            }
            for m in &measurements {
                if m.povm.dim() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: m.povm.dim() });
                }
            }
        }
        let raw: Vec<StateVector> = states.iter().map(|s| s.state.clone()).collect();
        let povms: Vec<Povm> = measurements.iter().map(|m| m.povm.clone()).collect();
        let computed = born_table(&raw, &povms)?;
        let tol = tolerances().born_row;
        if born.0.len() != states.len() {
            return Err(Error::InvalidScenario("Born table has the wrong number of states".into()));
        }
        for (si, (want, got)) in computed.0.iter().zip(&born.0).enumerate() {
            if want.len() != got.len() {
                return Err(Error::InvalidScenario("Born table has the wrong number of measurements".into()));
            }
            for (mi, (w, g)) in want.iter().zip(got).enumerate() {
                if w.len() != g.len() {
                    return Err(Error::InvalidScenario(format!(
                        "Born row for `{}` / `{}` has the wrong length",
                        states[si].label, measurements[mi].label
                    )));
                }
                let sum: f64 = g.iter().sum();
                if (sum - 1.0).abs() > tol || g.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return Err(Error::InvalidScenario(format!(
                        "Born row for `{}` / `{}` is not a distribution",
                        states[si].label, measurements[mi].label
                    )));
                }
                if w.iter().zip(g).any(|(a, b)| (a - b).abs() > tol) {
                    return Err(Error::InvalidScenario(format!(
                        "declared Born row for `{}` / `{}` disagrees with the states",
                        states[si].label, measurements[mi].label
                    )));
                }
            }
        }
        Ok(Self {
            states,
            measurements,
            born,
            epsilon,
            unitaries: Vec::new(),
            links: Vec::new(),
            basis: Vec::new(),
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::OutOfRange { name: "epsilon", value: epsilon });
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn with_unitary(mut self, label: &str, operator: Operator) -> Result<Self> {
        let d = self.dim();
        if operator.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: operator.dim() });
        }
        let defect = (&(&operator.adjoint() * &operator) - &Operator::identity(d)).frobenius_norm();
        if defect > tolerances().stabilizer {
            return Err(Error::InvalidScenario(format!("`{label}` is not unitary ({defect:e})")));
        }
        if self.unitaries.iter().any(|u| u.label == label) {
            return Err(Error::InvalidScenario(format!("duplicate unitary `{label}`")));
        }
        self.unitaries.push(LabeledUnitary { label: label.to_string(), operator });
        Ok(self)
    }

    /// Records that a stabilizer unitary of `fixed` carries `from` to `to`.
    /// If `unitary` names a registered operator, its action is checked.
    pub fn with_link(mut self, link: StabilizerLink) -> Result<Self> {
        for l in [&link.fixed, &link.from, &link.to] {
            self.state_index(l)?;
        }
        if let Some(u) = &link.unitary {
            let op = &self
                .unitaries
                .iter()
                .find(|x| &x.label == u)
                .ok_or_else(|| Error::UnknownTransform(u.clone()))?
                .operator;
            let tol = tolerances().stabilizer;
            let check = |a: &str, b: &str| -> Result<()> {
                let sa = self.state(a)?;
                let sb = self.state(b)?;
                let img = op.apply(sa.amplitudes())?;
                let r: f64 = img.iter().zip(sb.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
                if r > tol {
                    return Err(Error::InvalidScenario(format!("`{u}` does not map `{a}` to `{b}` ({r:e})")));
                }
                Ok(())
            };
            check(&link.fixed, &link.fixed)?;
            check(&link.from, &link.to)?;
        } else {
            let a = crate::hilbert::inner_product(self.state(&link.fixed)?, self.state(&link.from)?)?;
            let b = crate::hilbert::inner_product(self.state(&link.fixed)?, self.state(&link.to)?)?;
            if (a - b).norm() > tolerances().stabilizer {
                return Err(Error::InnerProductMismatch((a - b).norm()));
            }
        }
        self.links.push(link);
        Ok(self)
    }

    pub fn with_basis(mut self, labels: Vec<String>) -> Result<Self> {
        for l in &labels {
            self.state_index(l)?;
        }
        self.basis = labels;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.states
            .first()
            .map(|s| s.state.dim())
            .or_else(|| self.measurements.first().map(|m| m.povm.dim()))
            .unwrap_or(0)
    }

    pub fn states(&self) -> &[LabeledState] {
        &self.states
    }

    pub fn measurements(&self) -> &[LabeledMeasurement] {
        &self.measurements
    }

    pub fn born(&self) -> &BornTable {
        &self.born
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn unitaries(&self) -> &[LabeledUnitary] {
        &self.unitaries
    }

    pub fn links(&self) -> &[StabilizerLink] {
        &self.links
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn state_index(&self, label: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    pub fn state(&self, label: &str) -> Result<&StateVector> {
        Ok(&self.states[self.state_index(label)?].state)
    }

    pub fn measurement_index(&self, label: &str) -> Result<usize> {
        self.measurements
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| Error::UnknownMeasurement(label.to_string()))
    }

    pub fn unitary(&self, label: &str) -> Result<&Operator> {
        self.unitaries
            .iter()
            .find(|u| u.label == label)
            .map(|u| &u.operator)
            .ok_or_else(|| Error::UnknownTransform(label.to_string()))
    }

    /// Number of outcomes of each measurement.
    pub fn outcome_counts(&self) -> Vec<usize> {
        self.measurements.iter().map(|m| m.povm.len()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

fn unique<'a>(labels: impl Iterator<Item = &'a str>, what: &str) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::InvalidScenario(format!("duplicate {what} label `{l}`")));
        }
    }
    Ok(())
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            states: Vec<LabeledState>,
            measurements: Vec<LabeledMeasurement>,
            #[serde(default)]
            born: Option<BornTable>,
            epsilon: f64,
            #[serde(default)]
            unitaries: Vec<LabeledUnitary>,
            #[serde(default)]
            links: Vec<StabilizerLink>,
            #[serde(default)]
            basis: Vec<String>,
        }
        let doc = Doc::deserialize(d)?;
        let build = || -> Result<Scenario> {
            let mut s = match doc.born {
                Some(b) => Scenario::with_born(doc.states, doc.measurements, b, doc.epsilon)?,
                None => Scenario::new(doc.states, doc.measurements, doc.epsilon)?,
            };
            for u in doc.unitaries {
                s = s.with_unitary(&u.label, u.operator)?;
            }
            for l in doc.links {
                s = s.with_link(l)?;
            }
            s.with_basis(doc.basis)
        };
        build().map_err(serde::de::Error::custom)
    }
}
