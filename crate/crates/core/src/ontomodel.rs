//! Finite ontological models.
//!
//! An [`OnticModel`] assigns to every state label a nonempty set of
//! preparation distributions over a finite ontic space, to every measurement
//! label a set of response functions, and to every transformation label a set
//! of column-stochastic maps. More than one distribution per state models
//! preparation contextuality.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};

use crate::config::tolerances;
use crate::error::{Error, Result};
use crate::hilbert::{Operator, StateVector};
use crate::povm::Povm;
use crate::scenario::{LabeledMeasurement, LabeledState, Scenario};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct OnticSpace {
    labels: Vec<String>,
}

impl OnticSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidModel("empty ontic space".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidModel(format!("duplicate ontic label `{dup}`")));
        }
        Ok(Self { labels })
    }

    /// Ontic states named `l0, l1, ...`.
    pub fn numbered(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| format!("l{i}")).collect())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl<'de> Deserialize<'de> for OnticSpace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        OnticSpace::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// A probability distribution over the ontic space.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PrepDistribution {
    weights: Vec<f64>,
}

impl PrepDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("weight {w} is negative or not finite")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tolerances().distribution_sum {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Self { weights })
    }

    /// Clips negative entries and rescales to unit sum.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let clipped: Vec<f64> = weights.into_iter().map(|w| w.max(0.0)).collect();
        let sum: f64 = clipped.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::InvalidDistribution("no positive weight".into()));
        }
        Self::new(clipped.into_iter().map(|w| w / sum).collect())
    }

    pub fn point(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return Err(Error::DimensionMismatch { expected: size, found: at + 1 });
        }
        let mut w = vec![0.0; size];
        w[at] = 1.0;
        Self::new(w)
    }

    /// Uniform over the listed ontic indices.
    pub fn uniform_over(size: usize, support: &[usize]) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut w = vec![0.0; size];
        for &i in support {
            if i >= size {
                return Err(Error::DimensionMismatch { expected: size, found: i + 1 });
            }
            w[i] = 1.0 / support.len() as f64;
        }
        Self::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `lambda` with weight above the support threshold.
    pub fn support(&self) -> Vec<bool> {
        let t = tolerances().support;
        self.weights.iter().map(|&w| w > t).collect()
    }
}

impl<'de> Deserialize<'de> for PrepDistribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PrepDistribution::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `P(E_k | lambda)` stored as one row per outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ResponseFunction {
    probs: Vec<Vec<f64>>,
}

impl ResponseFunction {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        let n = probs.first().map(Vec::len).ok_or_else(|| Error::InvalidModel("response with no outcomes".into()))?;
        if n == 0 || probs.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel("ragged response matrix".into()));
        }
        if probs.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidModel("response probability outside [0, 1]".into()));
        }
        let tol = tolerances().distribution_sum;
        for l in 0..n {
            let col: f64 = probs.iter().map(|r| r[l]).sum();
            if (col - 1.0).abs() > tol {
                return Err(Error::InvalidModel(format!("response column {l} sums to {col}")));
            }
        }
        Ok(Self { probs })
    }

    /// Outcome `assignment[lambda]` with certainty at each ontic state.
    pub fn deterministic(outcomes: usize, assignment: &[usize]) -> Result<Self> {
        let mut probs = vec![vec![0.0; assignment.len()]; outcomes];
        for (l, &k) in assignment.iter().enumerate() {
            if k >= outcomes {
                return Err(Error::DimensionMismatch { expected: outcomes, found: k + 1 });
            }
            probs[k][l] = 1.0;
        }
        Self::new(probs)
    }

    pub fn outcomes(&self) -> usize {
        self.probs.len()
    }

    pub fn space_size(&self) -> usize {
        self.probs[0].len()
    }

    pub fn prob(&self, outcome: usize, lambda: usize) -> f64 {
        self.probs[outcome][lambda]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.probs
    }
}

impl<'de> Deserialize<'de> for ResponseFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ResponseFunction::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Column-stochastic kernel: `kernel[lambda][lambda']` is the probability of
/// moving from `lambda'` to `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct StochasticMap {
    kernel: Vec<Vec<f64>>,
}

impl StochasticMap {
    pub fn new(kernel: Vec<Vec<f64>>) -> Result<Self> {
        let n = kernel.len();
        if n == 0 || kernel.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel("stochastic map must be square".into()));
        }
        if kernel.iter().flatten().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidModel("negative transition probability".into()));
        }
        let tol = tolerances().distribution_sum;
        for c in 0..n {
            let col: f64 = kernel.iter().map(|r| r[c]).sum();
            if (col - 1.0).abs() > tol {
                return Err(Error::InvalidModel(format!("kernel column {c} sums to {col}")));
            }
        }
        Ok(Self { kernel })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
    }

    /// Sends `lambda` to `perm[lambda]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut k = vec![vec![0.0; n]; n];
        for (from, &to) in perm.iter().enumerate() {
            if to >= n {
                return Err(Error::DimensionMismatch { expected: n, found: to + 1 });
            }
            k[to][from] = 1.0;
        }
        Self::new(k)
    }

    pub fn size(&self) -> usize {
        self.kernel.len()
    }

    pub fn get(&self, to: usize, from: usize) -> f64 {
        self.kernel[to][from]
    }
}

impl<'de> Deserialize<'de> for StochasticMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        StochasticMap::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OnticModel {
    space: OnticSpace,
    preparations: BTreeMap<String, Vec<PrepDistribution>>,
    responses: BTreeMap<String, Vec<ResponseFunction>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    transforms: BTreeMap<String, Vec<StochasticMap>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<Scenario>,
}

impl OnticModel {
    pub fn new(
        space: OnticSpace,
        preparations: BTreeMap<String, Vec<PrepDistribution>>,
        responses: BTreeMap<String, Vec<ResponseFunction>>,
        transforms: BTreeMap<String, Vec<StochasticMap>>,
    ) -> Result<Self> {
        let n = space.size();
        for (label, set) in &preparations {
            if set.is_empty() {
                return Err(Error::InvalidModel(format!("state `{label}` has no preparation")));
            }
            if let Some(m) = set.iter().find(|m| m.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: m.len() });
            }
        }
        for (label, set) in &responses {
            if set.is_empty() {
                return Err(Error::InvalidModel(format!("measurement `{label}` has no response function")));
            }
            if let Some(r) = set.iter().find(|r| r.space_size() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: r.space_size() });
            }
            if set.iter().any(|r| r.outcomes() != set[0].outcomes()) {
                return Err(Error::InvalidModel(format!("response functions of `{label}` disagree on outcome count")));
            }
        }
        for (label, set) in &transforms {
            if set.is_empty() {
                return Err(Error::InvalidModel(format!("transform `{label}` has no stochastic map")));
            }
            if let Some(g) = set.iter().find(|g| g.size() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: g.size() });
            }
        }
        Ok(Self { space, preparations, responses, transforms, scenario: None })
    }

    /// Attaches the scenario the model is meant to reproduce.
    pub fn with_scenario(mut self, scenario: Scenario) -> Self {
        self.scenario = Some(scenario);
        self
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn preparations(&self) -> &BTreeMap<String, Vec<PrepDistribution>> {
        &self.preparations
    }

    pub fn responses(&self) -> &BTreeMap<String, Vec<ResponseFunction>> {
        &self.responses
    }

    pub fn transforms(&self) -> &BTreeMap<String, Vec<StochasticMap>> {
        &self.transforms
    }

    pub fn scenario(&self) -> Option<&Scenario> {
        self.scenario.as_ref()
    }

    pub fn preps(&self, label: &str) -> Result<&[PrepDistribution]> {
        self.preparations
            .get(label)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    pub fn response_set(&self, label: &str) -> Result<&[ResponseFunction]> {
        self.responses
            .get(label)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownMeasurement(label.to_string()))
    }

    /// `Lambda_label`: the union of the supports of every preparation of `label`.
    pub fn total_support(&self, label: &str) -> Result<Vec<bool>> {
        let mut out = vec![false; self.space.size()];
        for m in self.preps(label)? {
            for (o, s) in out.iter_mut().zip(m.support()) {
                *o |= s;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

impl<'de> Deserialize<'de> for OnticModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            space: OnticSpace,
            preparations: BTreeMap<String, Vec<PrepDistribution>>,
            responses: BTreeMap<String, Vec<ResponseFunction>>,
            #[serde(default)]
            transforms: BTreeMap<String, Vec<StochasticMap>>,
            #[serde(default)]
            scenario: Option<Scenario>,
        }
        let doc = Doc::deserialize(d)?;
        let m = OnticModel::new(doc.space, doc.preparations, doc.responses, doc.transforms)
            .map_err(serde::de::Error::custom)?;
        Ok(match doc.scenario {
            Some(s) => m.with_scenario(s),
            None => m,
        })
    }
}

/// `sum_lambda sum_lambda' mu(lambda') gamma(lambda|lambda') P(E_outcome|lambda)`.
pub fn predicted_probability(
    prep: &PrepDistribution,
    map: Option<&StochasticMap>,
    response: &ResponseFunction,
    outcome: usize,
) -> Result<f64> {
    let n = prep.len();
    if response.space_size() != n {
        return Err(Error::DimensionMismatch { expected: n, found: response.space_size() });
    }
    if outcome >= response.outcomes() {
        return Err(Error::DimensionMismatch { expected: response.outcomes(), found: outcome + 1 });
    }
    let moved;
    let mu = match map {
        Some(g) => {
            moved = apply_map(g, prep)?;
            &moved
        }
        None => prep,
    };
    let p: f64 = mu.weights().iter().enumerate().map(|(l, w)| w * response.prob(outcome, l)).sum();
    Ok(p.clamp(0.0, 1.0))
}

/// `nu(lambda) = sum_lambda' gamma(lambda|lambda') mu(lambda')`.
pub fn apply_map(map: &StochasticMap, mu: &PrepDistribution) -> Result<PrepDistribution> {
    let n = mu.len();
    if map.size() != n {
        return Err(Error::DimensionMismatch { expected: n, found: map.size() });
    }
    let w: Vec<f64> = (0..n)
        .map(|to| (0..n).map(|from| map.get(to, from) * mu.weights()[from]).sum())
        .collect();
    PrepDistribution::normalized(w)
}

/// `mu(Lambda_target)`, the probability that a sample from `mu` lies in the
/// total support of `target`'s preparations.
pub fn asymmetric_overlap(model: &OnticModel, target: &str, mu: &PrepDistribution) -> Result<f64> {
    multipartite_asymmetric_overlap(model, &[target], mu)
}

/// `mu` of the union of the total supports of all `targets`.
pub fn multipartite_asymmetric_overlap(model: &OnticModel, targets: &[&str], mu: &PrepDistribution) -> Result<f64> {
    let n = model.space().size();
    if mu.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mu.len() });
    }
    let mut covered = vec![false; n];
    for t in targets {
        for (c, s) in covered.iter_mut().zip(model.total_support(t)?) {
            *c |= s;
        }
    }
    let v: f64 = mu.weights().iter().zip(&covered).filter(|(_, c)| **c).map(|(w, _)| w).sum();
    Ok(v.clamp(0.0, 1.0))
}

/// `sum_lambda min(mu(lambda), nu(lambda))`.
pub fn symmetric_overlap(mu: &PrepDistribution, nu: &PrepDistribution) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::DimensionMismatch { expected: mu.len(), found: nu.len() });
    }
    let v: f64 = mu.weights().iter().zip(nu.weights()).map(|(a, b)| a.min(*b)).sum();
    Ok(v.clamp(0.0, 1.0))
}

/// Largest symmetric overlap over pairs of preparations of `s1` and `s2`.
pub fn symmetric_overlap_states(model: &OnticModel, s1: &str, s2: &str) -> Result<f64> {
    let a = model.preps(s1)?;
    let b = model.preps(s2)?;
    let mut best: f64 = 0.0;
    for mu in a {
        for nu in b {
            best = best.max(symmetric_overlap(mu, nu)?);
        }
    }
    Ok(best)
}

/// `sum_lambda min(mu(lambda), nu(lambda), chi(lambda))`.
pub fn tripartite_symmetric_overlap(mu: &PrepDistribution, nu: &PrepDistribution, chi: &PrepDistribution) -> Result<f64> {
    for x in [nu, chi] {
        if x.len() != mu.len() {
            return Err(Error::DimensionMismatch { expected: mu.len(), found: x.len() });
        }
    }
    let v: f64 = (0..mu.len())
        .map(|l| mu.weights()[l].min(nu.weights()[l]).min(chi.weights()[l]))
        .sum();
    Ok(v.clamp(0.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub state: String,
    pub preparation: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<(String, usize)>,
    pub measurement: String,
    pub response: usize,
    pub outcome: String,
    pub predicted: f64,
    pub born: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub max_deviation: f64,
    pub epsilon: f64,
    pub pass: bool,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn worst(&self) -> Option<&AuditEntry> {
        self.entries.iter().max_by(|a, b| a.deviation.total_cmp(&b.deviation))
    }
}

/// Compares every prediction of `model` with the scenario's Born table.
///
/// Each combination of preparation, response function and outcome is
/// checked; for every scenario unitary that the model also transforms, the
/// transformed preparations are checked against the Born table of `U|s>`.
/// The audit passes when the largest deviation is at most `epsilon` plus the
/// Born-row tolerance, which absorbs the rounding of computed models.
pub fn audit_model(model: &OnticModel, scenario: &Scenario) -> Result<AuditReport> {
    let mut entries = Vec::new();
    for (si, ls) in scenario.states().iter().enumerate() {
        let preps = model.preps(&ls.label)?;
        let mut variants: Vec<(Option<(String, usize)>, Option<&StochasticMap>, Vec<Vec<f64>>)> = Vec::new();
        variants.push((None, None, scenario.born().0[si].clone()));
        for u in scenario.unitaries() {
            if let Some(maps) = model.transforms().get(&u.label) {
                let moved = transformed(&u.operator, &ls.state)?;
                let rows = scenario
                    .measurements()
                    .iter()
                    .map(|m| m.povm.probabilities(&moved))
                    .collect::<Result<Vec<_>>>()?;
                for (gi, g) in maps.iter().enumerate() {
                    variants.push((Some((u.label.clone(), gi)), Some(g), rows.clone()));
                }
            }
        }
        for (pi, mu) in preps.iter().enumerate() {
            for (tag, map, born_rows) in &variants {
                for (mi, lm) in scenario.measurements().iter().enumerate() {
                    let set = model.response_set(&lm.label)?;
                    for (ri, r) in set.iter().enumerate() {
                        if r.outcomes() != lm.povm.len() {
                            return Err(Error::InvalidModel(format!(
                                "response for `{}` has {} outcomes, measurement has {}",
                                lm.label,
                                r.outcomes(),
                                lm.povm.len()
                            )));
                        }
                        for k in 0..r.outcomes() {
                            let predicted = predicted_probability(mu, *map, r, k)?;
                            let born = born_rows[mi][k];
                            entries.push(AuditEntry {
                                state: ls.label.clone(),
                                preparation: pi,
                                transform: tag.clone(),
                                measurement: lm.label.clone(),
                                response: ri,
                                outcome: lm.povm.labels()[k].clone(),
                                predicted,
                                born,
                                deviation: (predicted - born).abs(),
                            });
                        }
                    }
                }
            }
        }
    }
    let max_deviation = entries.iter().map(|e| e.deviation).fold(0.0, f64::max);
    let epsilon = scenario.epsilon();
    Ok(AuditReport {
        max_deviation,
        epsilon,
        pass: max_deviation <= epsilon + tolerances().born_row,
        entries,
    })
}

fn transformed(u: &Operator, s: &StateVector) -> Result<StateVector> {
    StateVector::normalized(u.apply(s.amplitudes())?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Epistemic,
    Ontic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub residual: f64,
}

/// Decides whether `psi` is an epistemic superposition of `basis`: every
/// preparation of `psi` must live inside the union of the basis states'
/// total supports. The residual is the largest mass any preparation of
/// `psi` puts outside that union.
pub fn classify_superposition(model: &OnticModel, psi: &str, basis: &[&str]) -> Result<Classification> {
    let mut worst: f64 = 0.0;
    for mu in model.preps(psi)? {
        let covered = multipartite_asymmetric_overlap(model, basis, mu)?;
        worst = worst.max(1.0 - covered);
    }
    let residual = worst.max(0.0);
    let verdict = if residual <= tolerances().epistemic { Verdict::Epistemic } else { Verdict::Ontic };
    Ok(Classification { verdict, residual })
}

/// Ontic states reachable by some preparation of `psi` but by no preparation
/// of any basis state. Empty exactly when `psi` is an epistemic superposition
/// up to the support threshold.
pub fn exclusive_support(model: &OnticModel, psi: &str, basis: &[&str]) -> Result<Vec<String>> {
    let own = model.total_support(psi)?;
    let mut covered = vec![false; own.len()];
    for b in basis {
        for (c, s) in covered.iter_mut().zip(model.total_support(b)?) {
            *c |= s;
        }
    }
    Ok(own
        .iter()
        .zip(&covered)
        .zip(model.space().labels())
        .filter(|((o, c), _)| **o && !**c)
        .map(|(_, l)| l.clone())
        .collect())
}

/// The four-state toy bit and the qubit scenario it reproduces.
///
/// Ontic space `{a, b, c, d}`; `|0)` is uniform on `{a, b}`, `|1)` on
/// `{c, d}`, `|+)` on `{a, c}` and `|-)` on `{b, d}`. The `Z` measurement
/// reads off the first pair, `X` the second.
pub fn spekkens_toy_bit() -> (OnticModel, Scenario) {
    build_toy_bit().expect("toy bit is well formed")
}

fn build_toy_bit() -> Result<(OnticModel, Scenario)> {
    let space = OnticSpace::new(["a", "b", "c", "d"].map(String::from).to_vec())?;
    let mut preps = BTreeMap::new();
    for (label, supp) in [("0", [0, 1]), ("1", [2, 3]), ("+", [0, 2]), ("-", [1, 3])] {
        preps.insert(label.to_string(), vec![PrepDistribution::uniform_over(4, &supp)?]);
    }
    let mut responses = BTreeMap::new();
    responses.insert("Z".to_string(), vec![ResponseFunction::deterministic(2, &[0, 0, 1, 1])?]);
    responses.insert("X".to_string(), vec![ResponseFunction::deterministic(2, &[0, 1, 0, 1])?]);
    let model = OnticModel::new(space, preps, responses, BTreeMap::new())?;

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let states = [("0", [1.0, 0.0]), ("1", [0.0, 1.0]), ("+", [h, h]), ("-", [h, -h])]
        .into_iter()
        .map(|(l, a)| Ok(LabeledState { label: l.into(), state: StateVector::from_real(&a)? }))
        .collect::<Result<Vec<_>>>()?;
    let z = Povm::from_onb(
        &crate::hilbert::Onb::new(vec![states[0].state.clone(), states[1].state.clone()])?,
        vec!["0".into(), "1".into()],
    )?;
    let x = Povm::from_onb(
        &crate::hilbert::Onb::new(vec![states[2].state.clone(), states[3].state.clone()])?,
        vec!["+".into(), "-".into()],
    )?;
    let measurements = vec![
        LabeledMeasurement { label: "Z".into(), povm: z },
        LabeledMeasurement { label: "X".into(), povm: x },
    ];
    // exact qubit values: [state][measurement][outcome] with measurements (Z, X)
    let born = crate::constructions::BornTable(vec![
        vec![vec![1.0, 0.0], vec![0.5, 0.5]],
        vec![vec![0.0, 1.0], vec![0.5, 0.5]],
        vec![vec![0.5, 0.5], vec![1.0, 0.0]],
        vec![vec![0.5, 0.5], vec![0.0, 1.0]],
    ]);
    let scenario = Scenario::with_born(states, measurements, born, 0.0)?
        .with_basis(vec!["0".into(), "1".into()])?;
    Ok((model, scenario))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (OnticModel, Scenario) {
        spekkens_toy_bit()
    }

    #[test]
    fn predicted_probability_examples() {
        let r = ResponseFunction::deterministic(2, &[0, 1]).unwrap();
        let point = PrepDistribution::point(2, 0).unwrap();
        assert_eq!(predicted_probability(&point, None, &r, 0).unwrap(), 1.0);
        let uni = PrepDistribution::uniform_over(2, &[0, 1]).unwrap();
        assert_eq!(predicted_probability(&uni, None, &r, 0).unwrap(), 0.5);

        let (m, _) = toy();
        let plus = &m.preps("+").unwrap()[0];
        let z = &m.response_set("Z").unwrap()[0];
        assert_eq!(predicted_probability(plus, None, z, 0).unwrap(), 0.5);
    }

    #[test]
    fn asymmetric_overlap_examples() {
        let (m, _) = toy();
        let plus = m.preps("+").unwrap()[0].clone();
        let minus = m.preps("-").unwrap()[0].clone();
        assert_eq!(asymmetric_overlap(&m, "0", &plus).unwrap(), 0.5);
        assert_eq!(asymmetric_overlap(&m, "+", &plus).unwrap(), 1.0);
        assert_eq!(asymmetric_overlap(&m, "-", &plus).unwrap(), 0.0);
        assert_eq!(asymmetric_overlap(&m, "+", &minus).unwrap(), 0.0);
        assert_eq!(multipartite_asymmetric_overlap(&m, &["0", "1"], &plus).unwrap(), 1.0);
        assert_eq!(multipartite_asymmetric_overlap(&m, &["0"], &plus).unwrap(), 0.5);
        assert!(matches!(asymmetric_overlap(&m, "y", &plus), Err(Error::UnknownState(_))));
    }

    #[test]
    fn symmetric_overlap_examples() {
        let (m, _) = toy();
        let zero = &m.preps("0").unwrap()[0];
        let plus = &m.preps("+").unwrap()[0];
        assert_eq!(symmetric_overlap(zero, zero).unwrap(), 1.0);
        assert_eq!(symmetric_overlap(zero, &m.preps("1").unwrap()[0]).unwrap(), 0.0);
        assert_eq!(symmetric_overlap(zero, plus).unwrap(), 0.5);
        assert_eq!(symmetric_overlap_states(&m, "0", "+").unwrap(), 0.5);
    }

    #[test]
    fn symmetric_overlap_states_takes_max() {
        let space = OnticSpace::numbered(5).unwrap();
        let nu = PrepDistribution::new(vec![0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let mu1 = PrepDistribution::new(vec![0.2, 0.0, 0.8, 0.0, 0.0]).unwrap();
        let mu2 = PrepDistribution::new(vec![0.4, 0.0, 0.0, 0.6, 0.0]).unwrap();
        let mut preps = BTreeMap::new();
        preps.insert("s1".to_string(), vec![mu1, mu2]);
        preps.insert("s2".to_string(), vec![nu]);
        let m = OnticModel::new(space, preps, BTreeMap::new(), BTreeMap::new()).unwrap();
        assert!((symmetric_overlap_states(&m, "s1", "s2").unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn tripartite_examples() {
        let a = PrepDistribution::uniform_over(4, &[0, 1]).unwrap();
        let b = PrepDistribution::uniform_over(4, &[1, 2]).unwrap();
        let c = PrepDistribution::uniform_over(4, &[1, 3]).unwrap();
        assert_eq!(tripartite_symmetric_overlap(&a, &b, &c).unwrap(), 0.5);
        assert_eq!(tripartite_symmetric_overlap(&a, &a, &a).unwrap(), 1.0);
        let far = PrepDistribution::point(4, 3).unwrap();
        assert_eq!(tripartite_symmetric_overlap(&a, &b, &far).unwrap(), 0.0);
    }

    #[test]
    fn apply_map_examples() {
        let mu = PrepDistribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(apply_map(&StochasticMap::identity(3).unwrap(), &mu).unwrap(), mu);
        let p = apply_map(&StochasticMap::permutation(&[1, 2, 0]).unwrap(), &mu).unwrap();
        assert_eq!(p.weights(), &[0.5, 0.2, 0.3]);
        let collapse = StochasticMap::new(vec![vec![1.0; 3], vec![0.0; 3], vec![0.0; 3]]).unwrap();
        assert_eq!(apply_map(&collapse, &mu).unwrap().weights(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn toy_bit_audit_and_classification() {
        let (m, sc) = toy();
        let r = audit_model(&m, &sc).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert!(r.pass);
        let c = classify_superposition(&m, "+", &["0", "1"]).unwrap();
        assert_eq!(c.verdict, Verdict::Epistemic);
        assert_eq!(c.residual, 0.0);
        assert!(exclusive_support(&m, "+", &["0", "1"]).unwrap().is_empty());
        let c = classify_superposition(&m, "0", &["0", "1"]).unwrap();
        assert_eq!(c, Classification { verdict: Verdict::Epistemic, residual: 0.0 });
    }

    #[test]
    fn faulty_response_is_located() {
        let (m, sc) = toy();
        let mut responses = m.responses().clone();
        responses.insert(
            "Z".into(),
            vec![ResponseFunction::new(vec![vec![1.0, 0.9, 0.0, 0.0], vec![0.0, 0.1, 1.0, 1.0]]).unwrap()],
        );
        let bad = OnticModel::new(m.space().clone(), m.preparations().clone(), responses, BTreeMap::new()).unwrap();
        let r = audit_model(&bad, &sc).unwrap();
        assert!((r.max_deviation - 0.05).abs() < 1e-12);
        assert!(!r.pass);
        let w = r.worst().unwrap();
        assert_eq!(w.measurement, "Z");
        assert!(audit_model(&bad, &sc.with_epsilon(1.0).unwrap()).unwrap().pass);
    }

    #[test]
    fn private_ontic_state_makes_superposition_ontic() {
        let space = OnticSpace::numbered(3).unwrap();
        let mut preps = BTreeMap::new();
        preps.insert("0".to_string(), vec![PrepDistribution::point(3, 0).unwrap()]);
        preps.insert("1".to_string(), vec![PrepDistribution::point(3, 1).unwrap()]);
        preps.insert("psi".to_string(), vec![PrepDistribution::new(vec![0.35, 0.35, 0.3]).unwrap()]);
        let m = OnticModel::new(space, preps, BTreeMap::new(), BTreeMap::new()).unwrap();
        let c = classify_superposition(&m, "psi", &["0", "1"]).unwrap();
        assert_eq!(c.verdict, Verdict::Ontic);
        assert!((c.residual - 0.3).abs() < 1e-12);
        assert_eq!(exclusive_support(&m, "psi", &["0", "1"]).unwrap(), vec!["l2".to_string()]);
    }

    #[test]
    fn model_json_round_trip_is_byte_exact() {
        let (m, sc) = toy();
        let m = m.with_scenario(sc);
        let text = m.to_json().unwrap();
        let back = OnticModel::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn invalid_parts_are_rejected() {
        assert!(PrepDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(PrepDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(ResponseFunction::new(vec![vec![1.0, 0.5], vec![0.0, 0.4]]).is_err());
        assert!(StochasticMap::new(vec![vec![0.5, 0.0], vec![0.4, 1.0]]).is_err());
        assert!(OnticSpace::new(vec!["a".into(), "a".into()]).is_err());
    }
}
