//! POVMs, anti-distinguishing measurements for triples of pure states, and
//! Helstrom discrimination of two pure states.

use serde::{Deserialize, Deserializer, Serialize};

use crate::config::tolerances;
use crate::constructions::{antidist_criterion_with_slack, triple_overlaps, CRITERION_SLACK};
use crate::error::{Error, Result};
use crate::hilbert::{hermitian_eig, psd_project, spectral_map, Onb, Operator, StateVector};

/// A positive operator-valued measure: Hermitian PSD elements summing to the
/// identity, one label per outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Povm {
    elements: Vec<Operator>,
    labels: Vec<String>,
}

impl Povm {
    pub fn new(elements: Vec<Operator>, labels: Vec<String>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        if labels.len() != elements.len() {
            return Err(Error::ArityMismatch { expected: elements.len(), found: labels.len() });
        }
        let tol = tolerances();
        let d = elements[0].dim();
        let mut sum = Operator::zeros(d);
        for (e, label) in elements.iter().zip(&labels) {
            if e.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: e.dim() });
            }
            let defect = e.hermiticity_defect();
            if defect > tol.hermiticity {
                return Err(Error::InvalidPovm(format!("element `{label}` is not Hermitian ({defect:e})")));
            }
            let (values, _) = hermitian_eig(&e.hermitian_part())?;
            let min = values.last().copied().unwrap_or(0.0);
            if min < -tol.psd {
                return Err(Error::InvalidPovm(format!("element `{label}` has eigenvalue {min:e}")));
            }
            sum = &sum + e;
        }
        let gap = (&sum - &Operator::identity(d)).frobenius_norm();
        if gap > tol.povm_completeness {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {gap:e}")));
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidPovm(format!("duplicate outcome label `{dup}`")));
        }
        Ok(Self { elements, labels })
    }

    /// The projective measurement onto the members of `basis`.
    pub fn from_onb(basis: &Onb, labels: Vec<String>) -> Result<Self> {
        Self::new(basis.vectors().iter().map(StateVector::projector).collect(), labels)
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Born probabilities `<s|E_k|s>`.
    pub fn probabilities(&self, s: &StateVector) -> Result<Vec<f64>> {
        self.elements.iter().map(|e| Ok(e.expectation(s)?.re)).collect()
    }
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            elements: Vec<Operator>,
            labels: Vec<String>,
        }
        let doc = Doc::deserialize(d)?;
        Povm::new(doc.elements, doc.labels).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntidistReport {
    /// `<psi_i|E_i|psi_i>` for each state.
    pub errors: Vec<f64>,
    pub max_error: f64,
    pub pass: bool,
}

/// Checks that outcome `i` of `povm` never fires on state `i`.
pub fn verify_antidistinguishing(povm: &Povm, states: &[StateVector], tol: f64) -> Result<AntidistReport> {
    if povm.len() != states.len() {
        return Err(Error::ArityMismatch { expected: povm.len(), found: states.len() });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::OutOfRange { name: "tol", value: tol });
    }
    let errors = povm
        .elements()
        .iter()
        .zip(states)
        .map(|(e, s)| Ok(e.expectation(s)?.re.max(0.0)))
        .collect::<Result<Vec<_>>>()?;
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    Ok(AntidistReport { pass: max_error <= tol, errors, max_error })
}

/// Finds a three-outcome POVM with `E_i |psi_i> = 0` by Dykstra's alternating
/// projections between `{E_1 + E_2 + E_3 = I}` and the cones
/// `{E_i >= 0, E_i |psi_i> = 0}`.
///
/// Every few iterations the current cone iterate is turned into a candidate
/// POVM: each element is compressed onto the span of the states, the
/// orthocomplement is shared equally among the outcomes, and the result is
/// conjugated by `S^{-1/2}`, `S` the element sum, so that it is exactly
/// complete. The candidate is returned once its residual falls below `tol`.
pub fn synthesize_antidistinguishing(states: &[StateVector], max_iters: usize, tol: f64) -> Result<Povm> {
    if states.len() != 3 {
        return Err(Error::ArityMismatch { expected: 3, found: states.len() });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::OutOfRange { name: "tol", value: tol });
    }
    let d = states[0].dim();
    if let Some(s) = states.iter().find(|s| s.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
    }
    let (a, b, c) = triple_overlaps(&states[0], &states[1], &states[2])?;
    if !antidist_criterion_with_slack(a, b, c, CRITERION_SLACK)? {
        return Err(Error::CriterionFailed(a, b, c));
    }

    let id = Operator::identity(d);
    let compressors: Vec<Operator> = states.iter().map(|s| &id - &s.projector()).collect();
    let span = span_projector(states)?;
    let third = (&id - &span).scale(1.0 / 3.0);

    let mut x: Vec<Operator> = vec![id.scale(1.0 / 3.0); 3];
    let mut p: Vec<Operator> = vec![Operator::zeros(d); 3];
    let mut q: Vec<Operator> = vec![Operator::zeros(d); 3];
    let mut residual = f64::INFINITY;
    let check_every = 5;

    for iter in 1..=max_iters {
        // affine step
        let xp: Vec<Operator> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        let y = project_affine(&xp, &id);
        p = xp.iter().zip(&y).map(|(a, b)| a - b).collect();
        // cone step
        let yq: Vec<Operator> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        x = yq
            .iter()
            .zip(&compressors)
            .map(|(m, pr)| psd_project(&(&(pr * m) * pr).hermitian_part()))
            .collect::<Result<Vec<_>>>()?;
        q = yq.iter().zip(&x).map(|(a, b)| a - b).collect();

        if iter % check_every == 0 || iter == max_iters {
            if let Some((povm, r)) = candidate(&x, &span, &third, states)? {
                residual = r;
                if r < tol {
                    return Ok(povm);
                }
            }
        }
    }
    Err(Error::NoConvergence { what: "anti-distinguishing POVM synthesis", residual })
}

fn project_affine(x: &[Operator], id: &Operator) -> Vec<Operator> {
    let mut excess = &(&(&x[0] + &x[1]) + &x[2]) - id;
    excess = excess.scale(1.0 / 3.0);
    x.iter().map(|e| e - &excess).collect()
}

/// Orthogonal projector onto the span of `states`.
fn span_projector(states: &[StateVector]) -> Result<Operator> {
    let d = states[0].dim();
    let mut gram = Operator::zeros(d);
    for s in states {
        gram = &gram + &s.projector();
    }
    let (values, vectors) = hermitian_eig(&gram)?;
    Ok(spectral_map(&values, &vectors, |l| if l > 1e-10 { 1.0 } else { 0.0 }))
}

fn candidate(x: &[Operator], span: &Operator, third: &Operator, states: &[StateVector]) -> Result<Option<(Povm, f64)>> {
    let d = span.dim();
    let compressed: Vec<Operator> =
        x.iter().map(|e| &(&(span * e) * span).hermitian_part() + third).collect();
    let mut sum = Operator::zeros(d);
    for e in &compressed {
        sum = &sum + e;
    }
    let (values, vectors) = hermitian_eig(&sum)?;
    if values.last().copied().unwrap_or(0.0) <= 1e-6 {
        return Ok(None);
    }
    let inv_sqrt = spectral_map(&values, &vectors, |l| 1.0 / l.sqrt());
    let elements: Vec<Operator> = compressed
        .iter()
        .map(|e| (&(&inv_sqrt * e) * &inv_sqrt).hermitian_part())
        .collect();

    let mut total = Operator::zeros(d);
    let mut worst: f64 = 0.0;
    for (e, s) in elements.iter().zip(states) {
        total = &total + e;
        let (ev, _) = hermitian_eig(e)?;
        worst = worst.max(-ev.last().copied().unwrap_or(0.0));
        worst = worst.max(e.expectation(s)?.re.abs());
    }
    worst = worst.max((&total - &Operator::identity(d)).frobenius_norm());
    match Povm::new(elements, (1..=3).map(|i| format!("not_{i}")).collect()) {
        Ok(povm) => Ok(Some((povm, worst))),
        Err(Error::InvalidPovm(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Minimum total error probability `1 - sqrt(1 - |<phi|psi>|^2)` for
/// discriminating two pure states; half of it is the average error at equal priors.
pub fn helstrom_bound(overlap_sq: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap_sq) {
        return Err(Error::OutOfRange { name: "overlap_sq", value: overlap_sq });
    }
    Ok(1.0 - (1.0 - overlap_sq).sqrt())
}

/// Projective measurement onto the nonnegative (outcome `psi`) and negative
/// (outcome `phi`) eigenspaces of `|psi><psi| - |phi><phi|`.
pub fn helstrom_measurement(psi: &StateVector, phi: &StateVector) -> Result<Povm> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), found: phi.dim() });
    }
    if psi.same_ray(phi) {
        return Err(Error::IdenticalStates);
    }
    let diff = &psi.projector() - &phi.projector();
    let (values, vectors) = hermitian_eig(&diff)?;
    let first = spectral_map(&values, &vectors, |l| if l >= -1e-12 { 1.0 } else { 0.0 });
    let second = spectral_map(&values, &vectors, |l| if l >= -1e-12 { 0.0 } else { 1.0 });
    Povm::new(vec![first, second], vec!["psi".into(), "phi".into()])
}

/// Average error of `povm` (outcome 0 for `psi`, 1 for `phi`) at equal priors.
pub fn discrimination_error(povm: &Povm, psi: &StateVector, phi: &StateVector) -> Result<f64> {
    if povm.len() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: povm.len() });
    }
    let miss_psi = povm.elements()[1].expectation(psi)?.re;
    let miss_phi = povm.elements()[0].expectation(phi)?.re;
    Ok(0.5 * (miss_psi + miss_phi))
}

/// Anti-distinguishing POVM for three orthonormal states: outcome `i`
/// projects onto state `i+1 mod 3`, and outcome 0 also takes the rest of the space.
pub fn cyclic_projector_povm(states: &[StateVector; 3]) -> Result<Povm> {
    let d = states[0].dim();
    let mut elements: Vec<Operator> = (0..3).map(|i| states[(i + 1) % 3].projector()).collect();
    let mut rest = Operator::identity(d);
    for s in states {
        rest = &rest - &s.projector();
    }
    elements[0] = &elements[0] + &rest;
    Povm::new(elements, (1..=3).map(|i| format!("not_{i}")).collect())
}
