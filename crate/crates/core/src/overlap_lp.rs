//! Overlap maximisation over vertex models.
//!
//! The ontic states of a vertex model are deterministic outcome assignments,
//! one outcome per measurement of the scenario. Preparations are
//! distributions over vertices that reproduce the Born table within the
//! scenario's `epsilon`. Overlaps are maximised by linear programming.
//!
//! Stabilizer links recorded in a scenario (a unitary fixing state `f` and
//! carrying `a` to `b`) are imposed as overlap monotonicity: the preparation
//! of `f` is shared, and whatever part of it lies in the support of `a` must
//! be matched by the part lying in the support of `b`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::thm2_bound;
use crate::config::tolerances;
use crate::constructions::{build_thm1, build_thm2, BornTable};
use crate::error::{Error, Result};
use crate::hilbert::{build_stabilizer_unitary, inner_product, Operator, StateVector};
use crate::lp::{solve_lp, LpProblem, LpStatus, Sense};
use crate::ontomodel::{OnticModel, OnticSpace, PrepDistribution, ResponseFunction};
use crate::povm::{synthesize_antidistinguishing, Povm};
use crate::scenario::{LabeledMeasurement, LabeledState, Scenario, StabilizerLink};

/// Deterministic outcome assignments over a product of allowed outcome lists.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSpace {
    outcome_counts: Vec<usize>,
    allowed: Vec<Vec<usize>>,
    vertices: Vec<Vec<usize>>,
}

impl VertexSpace {
    fn product(outcome_counts: Vec<usize>, allowed: Vec<Vec<usize>>) -> Result<Self> {
        let count = product_size(&allowed);
        let limit = tolerances().vertex_limit;
        if count > limit as f64 {
            return Err(Error::TooLarge { count, limit });
        }
        let mut vertices = Vec::with_capacity(count as usize);
        if allowed.iter().all(|a| !a.is_empty()) {
            let mut digits = vec![0usize; allowed.len()];
            loop {
                vertices.push(digits.iter().zip(&allowed).map(|(&i, a)| a[i]).collect());
                let mut k = allowed.len();
                loop {
                    if k == 0 {
                        return Ok(Self { outcome_counts, allowed, vertices });
                    }
                    k -= 1;
                    digits[k] += 1;
                    if digits[k] < allowed[k].len() {
                        break;
                    }
                    digits[k] = 0;
                }
            }
        }
        Ok(Self { outcome_counts, allowed, vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec<usize>] {
        &self.vertices
    }

    pub fn outcome_counts(&self) -> &[usize] {
        &self.outcome_counts
    }

    /// Outcomes each vertex may take, per measurement.
    pub fn allowed(&self) -> &[Vec<usize>] {
        &self.allowed
    }

    /// Position of `assignment` in [`VertexSpace::vertices`].
    pub fn index_of(&self, assignment: &[usize]) -> Option<usize> {
        if assignment.len() != self.allowed.len() {
            return None;
        }
        let mut idx = 0usize;
        for (o, a) in assignment.iter().zip(&self.allowed) {
            let p = a.iter().position(|x| x == o)?;
            idx = idx * a.len() + p;
        }
        Some(idx)
    }

    pub fn label(&self, v: usize) -> String {
        let parts: Vec<String> = self.vertices[v].iter().map(|o| o.to_string()).collect();
        format!("v{}", parts.join("_"))
    }
}

fn product_size(allowed: &[Vec<usize>]) -> f64 {
    allowed.iter().map(|a| a.len() as f64).product()
}

/// Every deterministic assignment of one outcome per measurement.
pub fn build_vertex_space(scenario: &Scenario) -> Result<VertexSpace> {
    let counts = scenario.outcome_counts();
    let allowed = counts.iter().map(|&n| (0..n).collect()).collect();
    VertexSpace::product(counts, allowed)
}

/// For each measurement and outcome, whether some outcome distribution within
/// `epsilon` of the state's Born row gives the outcome probability at least
/// the usable-vertex threshold.
///
/// A vertex can carry weight in a reproducing distribution exactly when each
/// of its outcomes is achievable in this sense, because the product of
/// per-measurement distributions reproduces every marginal.
pub fn achievable_outcomes(scenario: &Scenario, state: &str) -> Result<Vec<Vec<bool>>> {
    let s = scenario.state_index(state)?;
    let eps = scenario.epsilon();
    let thr = tolerances().usable_vertex;
    scenario
        .born()
        .0[s]
        .iter()
        .map(|row| {
            (0..row.len())
                .map(|k| Ok(max_marginal(row, k, eps)? >= thr))
                .collect::<Result<Vec<bool>>>()
        })
        .collect()
}

fn max_marginal(row: &[f64], k: usize, eps: f64) -> Result<f64> {
    let n = row.len();
    let mut lp = LpProblem::new(n);
    lp.objective[k] = 1.0;
    lp.add((0..n).map(|j| (j, 1.0)).collect(), Sense::Eq, 1.0);
    add_band(&mut lp, row.iter().enumerate().map(|(j, &b)| (vec![(j, 1.0)], b)), eps);
    let sol = solve_lp(&lp)?;
    Ok(match sol.status {
        LpStatus::Optimal => sol.value,
        _ => 0.0,
    })
}

/// `|lhs - target| <= eps`, as one equality at `eps = 0`.
fn add_band(lp: &mut LpProblem, rows: impl Iterator<Item = (Vec<(usize, f64)>, f64)>, eps: f64) {
    for (coeffs, target) in rows {
        if eps == 0.0 {
            lp.add(coeffs, Sense::Eq, target);
        } else {
            lp.add(coeffs.clone(), Sense::Le, target + eps);
            lp.add(coeffs, Sense::Ge, target - eps);
        }
    }
}

fn usable(ach: &[Vec<bool>], vertex: &[usize]) -> bool {
    vertex.iter().zip(ach).all(|(&o, a)| a[o])
}

fn restricted_space(scenario: &Scenario, ach: &[Vec<bool>]) -> Result<VertexSpace> {
    let allowed = ach
        .iter()
        .map(|a| a.iter().enumerate().filter(|(_, u)| **u).map(|(k, _)| k).collect())
        .collect();
    VertexSpace::product(scenario.outcome_counts(), allowed)
}

/// Labels reachable from `seed` through links that fix `fixed`, and the links used.
fn link_closure<'a>(scenario: &'a Scenario, fixed: &str, seed: &[String]) -> (Vec<String>, Vec<&'a StabilizerLink>) {
    let mut set: Vec<String> = Vec::new();
    for s in seed {
        if !set.contains(s) {
            set.push(s.clone());
        }
    }
    let mut grew = true;
    while grew {
        grew = false;
        for l in scenario.links() {
            if l.fixed == fixed && set.contains(&l.from) && !set.contains(&l.to) {
                set.push(l.to.clone());
                grew = true;
            }
        }
    }
    let links = scenario
        .links()
        .iter()
        .filter(|l| l.fixed == fixed && set.contains(&l.from) && set.contains(&l.to))
        .collect();
    (set, links)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymmetricOptions {
    /// Require the preparation to be an epistemic superposition of the
    /// scenario's basis: the part of it attributed to each basis state `i`
    /// must carry exactly `|<i|psi>|^2`.
    pub epistemic_constraint: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymmetricReport {
    pub target: String,
    pub prep_of: String,
    pub epsilon: f64,
    pub status: LpStatus,
    /// Upper bound on the asymmetric overlap when the LP is feasible.
    pub value: Option<f64>,
    /// Vertices usable by each tracked state, within the preparation's space.
    pub usable: BTreeMap<String, usize>,
    pub vertices: usize,
    pub variables: usize,
    pub pivots: usize,
}

/// Upper bound on `mu(Lambda_target)` over vertex models of `scenario` in
/// which `mu` is a preparation of `prep_of`.
///
/// Stage one computes, for the target and every state linked to it, the set
/// `S_k` of vertices some reproducing distribution of `k` can use. Stage two
/// splits `mu` on each vertex into parts indexed by subsets of the states
/// whose `S_k` contains it; the part attributed to `k` is `w_k <= mu`, which
/// stands for the mass of `mu` inside the (unknown) support of `k`.
/// Stabilizer links become `sum w_to >= sum w_from`; the optional epistemic
/// constraint fixes `sum w_i` for each basis state. The objective is
/// `sum w_target`.
pub fn max_asymmetric_overlap_upper(
    scenario: &Scenario,
    target: &str,
    prep_of: &str,
    options: AsymmetricOptions,
) -> Result<AsymmetricReport> {
    scenario.state_index(target)?;
    let p = scenario.state_index(prep_of)?;
    let eps = scenario.epsilon();

    let mut seed = vec![target.to_string()];
    if options.epistemic_constraint {
        if scenario.basis().is_empty() {
            return Err(Error::InvalidScenario("the epistemic constraint needs a basis".into()));
        }
        seed.extend(scenario.basis().iter().cloned());
    }
    let (tracked, links) = link_closure(scenario, prep_of, &seed);

    let ach_p = achievable_outcomes(scenario, prep_of)?;
    let space = restricted_space(scenario, &ach_p)?;
    let ach: Vec<Vec<Vec<bool>>> =
        tracked.iter().map(|k| achievable_outcomes(scenario, k)).collect::<Result<_>>()?;

    let mut lp = LpProblem::new(0);
    // y(lambda, sigma): per vertex, the variables and the tracked states each contains
    let mut vertex_vars: Vec<Vec<(usize, Vec<usize>)>> = Vec::with_capacity(space.len());
    let mut usable_counts = vec![0usize; tracked.len()];
    for v in space.vertices() {
        let partners: Vec<usize> = (0..tracked.len()).filter(|&k| usable(&ach[k], v)).collect();
        for &k in &partners {
            usable_counts[k] += 1;
        }
        if partners.len() > 16 {
            return Err(Error::TooLarge { count: 2f64.powi(partners.len() as i32), limit: 1 << 16 });
        }
        let mut vars = Vec::with_capacity(1 << partners.len());
        for mask in 0u32..(1u32 << partners.len()) {
            let members: Vec<usize> =
                partners.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &k)| k).collect();
            vars.push((lp.add_var(), members));
        }
        vertex_vars.push(vars);
    }

    let w = |k: usize| -> Vec<(usize, f64)> {
        vertex_vars
            .iter()
            .flatten()
            .filter(|(_, m)| m.contains(&k))
            .map(|(j, _)| (*j, 1.0))
            .collect()
    };

    // marginals of mu
    let born = &scenario.born().0[p];
    let mut marg: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for (mi, row) in born.iter().enumerate() {
        for &o in &space.allowed()[mi] {
            let coeffs: Vec<(usize, f64)> = space
                .vertices()
                .iter()
                .zip(&vertex_vars)
                .filter(|(v, _)| v[mi] == o)
                .flat_map(|(_, vars)| vars.iter().map(|(j, _)| (*j, 1.0)))
                .collect();
            marg.push((coeffs, row[o]));
        }
    }
    add_band(&mut lp, marg.into_iter(), eps);
    lp.add((0..lp.num_vars).map(|j| (j, 1.0)).collect(), Sense::Eq, 1.0);

    for l in &links {
        let to = tracked.iter().position(|k| k == &l.to).expect("closure contains link targets");
        let from = tracked.iter().position(|k| k == &l.from).expect("closure contains link sources");
        let mut row = w(to);
        row.extend(w(from).into_iter().map(|(j, a)| (j, -a)));
        lp.add(row, Sense::Ge, 0.0);
    }

    if options.epistemic_constraint {
        let psi = scenario.state(prep_of)?;
        let rows = scenario
            .basis()
            .iter()
            .map(|b| {
                let k = tracked.iter().position(|t| t == b).expect("basis labels are tracked");
                let amp = inner_product(scenario.state(b)?, psi)?.norm_sqr();
                Ok((w(k), amp))
            })
            .collect::<Result<Vec<_>>>()?;
        add_band(&mut lp, rows.into_iter(), eps);
    }

    for (j, _) in w(0) {
        lp.objective[j] = 1.0;
    }
    let sol = solve_lp(&lp)?;
    Ok(AsymmetricReport {
        target: target.to_string(),
        prep_of: prep_of.to_string(),
        epsilon: eps,
        status: sol.status,
        value: (sol.status == LpStatus::Optimal).then(|| sol.value.clamp(0.0, 1.0)),
        usable: tracked.iter().cloned().zip(usable_counts).collect(),
        vertices: space.len(),
        variables: lp.num_vars,
        pivots: sol.pivots,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricReport {
    pub s1: String,
    pub s2: String,
    pub epsilon: f64,
    pub status: LpStatus,
    pub value: Option<f64>,
    pub vertices: usize,
    pub variables: usize,
    pub pivots: usize,
    /// A vertex model attaining the optimum, when feasible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<OnticModel>,
}

/// Maximises `sum_lambda min(mu(lambda), nu(lambda))` over vertex models in
/// which `mu` prepares `s1` and `nu` prepares `s2`.
///
/// On each vertex `mu` is split into parts indexed by subsets of the states
/// whose preparation may share that vertex; the part attributed to `k` is the
/// common mass `t_k <= min(mu, chi_k)`, with `chi_k = t_k + s_k` a
/// preparation of `k`. Stabilizer links that fix one of the pair are
/// imposed as `sum t_to >= sum t_from`, the preparation of the fixed state
/// playing the role of `mu`.
pub fn max_symmetric_overlap(scenario: &Scenario, s1: &str, s2: &str) -> Result<SymmetricReport> {
    scenario.state_index(s1)?;
    scenario.state_index(s2)?;
    let eps = scenario.epsilon();
    let swap = !scenario.links().iter().any(|l| l.fixed == s1) && scenario.links().iter().any(|l| l.fixed == s2);
    let (a, b) = if swap { (s2, s1) } else { (s1, s2) };
    let (others, links) = link_closure(scenario, a, &[b.to_string()]);

    let space = build_vertex_space(scenario)?;
    let ach_a = achievable_outcomes(scenario, a)?;
    let ach: Vec<Vec<Vec<bool>>> = others.iter().map(|k| achievable_outcomes(scenario, k)).collect::<Result<_>>()?;

    let mut lp = LpProblem::new(0);
    let mut mu_vars: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); space.len()];
    let mut slack: Vec<Vec<Option<usize>>> = vec![vec![None; space.len()]; others.len()];
    for (vi, v) in space.vertices().iter().enumerate() {
        let partners: Vec<usize> = (0..others.len()).filter(|&k| usable(&ach[k], v)).collect();
        if usable(&ach_a, v) {
            if partners.len() > 16 {
                return Err(Error::TooLarge { count: 2f64.powi(partners.len() as i32), limit: 1 << 16 });
            }
            for mask in 0u32..(1u32 << partners.len()) {
                let members: Vec<usize> =
                    partners.iter().enumerate().filter(|(bit, _)| mask & (1 << bit) != 0).map(|(_, &k)| k).collect();
                mu_vars[vi].push((lp.add_var(), members));
            }
        }
        for &k in &partners {
            slack[k][vi] = Some(lp.add_var());
        }
    }

    let t_at = |k: usize, vi: usize| -> Vec<(usize, f64)> {
        mu_vars[vi].iter().filter(|(_, m)| m.contains(&k)).map(|(j, _)| (*j, 1.0)).collect()
    };
    let mu_at = |vi: usize| -> Vec<(usize, f64)> { mu_vars[vi].iter().map(|(j, _)| (*j, 1.0)).collect() };
    let chi_at = |k: usize, vi: usize| -> Vec<(usize, f64)> {
        let mut c = t_at(k, vi);
        if let Some(s) = slack[k][vi] {
            c.push((s, 1.0));
        }
        c
    };

    let add_prep = |lp: &mut LpProblem, state: &str, at: &dyn Fn(usize) -> Vec<(usize, f64)>| -> Result<()> {
        let born = &scenario.born().0[scenario.state_index(state)?];
        let mut rows = Vec::new();
        for (mi, row) in born.iter().enumerate() {
            for (o, &target) in row.iter().enumerate() {
                let coeffs: Vec<(usize, f64)> = space
                    .vertices()
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v[mi] == o)
                    .flat_map(|(vi, _)| at(vi))
                    .collect();
                rows.push((coeffs, target));
            }
        }
        add_band(lp, rows.into_iter(), eps);
        lp.add((0..space.len()).flat_map(at).collect(), Sense::Eq, 1.0);
        Ok(())
    };
    add_prep(&mut lp, a, &mu_at)?;
    for k in 0..others.len() {
        add_prep(&mut lp, &others[k], &|vi| chi_at(k, vi))?;
    }
    let t_total = |k: usize| -> Vec<(usize, f64)> { (0..space.len()).flat_map(|vi| t_at(k, vi)).collect() };
    for l in &links {
        let to = others.iter().position(|k| k == &l.to).expect("closure contains link targets");
        let from = others.iter().position(|k| k == &l.from).expect("closure contains link sources");
        let mut row = t_total(to);
        row.extend(t_total(from).into_iter().map(|(j, c)| (j, -c)));
        lp.add(row, Sense::Ge, 0.0);
    }
    for (j, _) in t_total(0) {
        lp.objective[j] = 1.0;
    }

    let sol = solve_lp(&lp)?;
    let mut report = SymmetricReport {
        s1: s1.to_string(),
        s2: s2.to_string(),
        epsilon: eps,
        status: sol.status,
        value: None,
        vertices: space.len(),
        variables: lp.num_vars,
        pivots: sol.pivots,
        model: None,
    };
    if sol.status != LpStatus::Optimal {
        return Ok(report);
    }
    report.value = Some(sol.value.clamp(0.0, 1.0));

    let dist = |coeffs: Vec<Vec<(usize, f64)>>| -> Result<PrepDistribution> {
        PrepDistribution::normalized(coeffs.iter().map(|c| c.iter().map(|&(j, w)| w * sol.x[j]).sum()).collect())
    };
    let mut preps: BTreeMap<String, Vec<PrepDistribution>> = BTreeMap::new();
    preps.insert(a.to_string(), vec![dist((0..space.len()).map(mu_at).collect())?]);
    for (k, label) in others.iter().enumerate() {
        preps.insert(label.clone(), vec![dist((0..space.len()).map(|vi| chi_at(k, vi)).collect())?]);
    }
    for ls in scenario.states() {
        if !preps.contains_key(&ls.label) {
            preps.insert(ls.label.clone(), vec![product_distribution(&space, scenario.born(), scenario.state_index(&ls.label)?)?]);
        }
    }
    report.model = Some(vertex_model(scenario, &space, preps)?);
    Ok(report)
}

/// `prod_M Born(s, M, lambda_M)`, with Born entries below the usable-vertex
/// threshold treated as zero.
fn product_distribution(space: &VertexSpace, born: &BornTable, state: usize) -> Result<PrepDistribution> {
    let thr = tolerances().usable_vertex;
    let rows = &born.0[state];
    PrepDistribution::normalized(
        space
            .vertices()
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .map(|(mi, &o)| if rows[mi][o] < thr { 0.0 } else { rows[mi][o] })
                    .product()
            })
            .collect(),
    )
}

/// The vertex model over the full vertex space in which every state is
/// prepared by the product of its Born rows. It reproduces the scenario's
/// statistics up to the usable-vertex threshold.
pub fn product_model(scenario: &Scenario) -> Result<OnticModel> {
    let space = build_vertex_space(scenario)?;
    let preps = (0..scenario.states().len())
        .map(|s| Ok((scenario.states()[s].label.clone(), vec![product_distribution(&space, scenario.born(), s)?])))
        .collect::<Result<BTreeMap<_, _>>>()?;
    vertex_model(scenario, &space, preps)
}

fn vertex_model(
    scenario: &Scenario,
    space: &VertexSpace,
    preps: BTreeMap<String, Vec<PrepDistribution>>,
) -> Result<OnticModel> {
    let ontic = OnticSpace::new((0..space.len()).map(|v| space.label(v)).collect())?;
    let mut responses = BTreeMap::new();
    for (mi, m) in scenario.measurements().iter().enumerate() {
        let assignment: Vec<usize> = space.vertices().iter().map(|v| v[mi]).collect();
        responses.insert(m.label.clone(), vec![ResponseFunction::deterministic(m.povm.len(), &assignment)?]);
    }
    Ok(OnticModel::new(ontic, preps, responses, BTreeMap::new())?.with_scenario(scenario.clone()))
}

/// Outcome labels `0, 1', 2', ...` of a basis measurement.
fn basis_labels(d: usize) -> Vec<String> {
    (0..d).map(|k| if k == 0 { "0".to_string() } else { format!("{k}'") }).collect()
}

const SCENARIO_POVM_TOL: f64 = 1e-12;
const SCENARIO_POVM_ITERS: usize = 200_000;

fn antidist_measurement(label: &str, states: [(&str, &StateVector); 3]) -> Result<LabeledMeasurement> {
    let raw = [states[0].1.clone(), states[1].1.clone(), states[2].1.clone()];
    let povm = synthesize_antidistinguishing(&raw, SCENARIO_POVM_ITERS, SCENARIO_POVM_TOL)
        .map_err(|e| Error::SynthesisFailed(format!("{label}: {e}")))?;
    let labels = states.iter().map(|(l, _)| format!("not_{l}")).collect();
    Ok(LabeledMeasurement { label: label.to_string(), povm: Povm::new(povm.elements().to_vec(), labels)? })
}

/// Conjugates every element by the basis permutation `e_j -> e_perm[j]`.
fn permute_povm(povm: &Povm, perm: &[usize], labels: Vec<String>) -> Result<Povm> {
    let d = perm.len();
    let elements = povm
        .elements()
        .iter()
        .map(|e| {
            let mut out = Operator::zeros(d);
            for i in 0..d {
                for j in 0..d {
                    out.set(perm[i], perm[j], e.get(i, j));
                }
            }
            out
        })
        .collect();
    Povm::new(elements, labels)
}

/// The prepare-and-measure scenario behind the first overlap theorem.
///
/// States: `psi`, `phi`, `ket0` and the remaining basis states `b1, ...`.
/// Measurements: `B`, the basis measurement, and `A`, an anti-distinguishing
/// measurement for `{psi, phi, ket0}`. One stabilizer link records the
/// unitary `U` that fixes `psi` and sends `ket0` to `phi`. The basis
/// `ket0, b1, ...` is registered for the epistemic constraint.
pub fn thm1_scenario(alpha: f64, d: usize, epsilon: f64) -> Result<Scenario> {
    let fam = build_thm1(alpha, d)?;
    let mut states = vec![
        LabeledState { label: "psi".into(), state: fam.psi.clone() },
        LabeledState { label: "phi".into(), state: fam.phi.clone() },
        LabeledState { label: "ket0".into(), state: fam.ket0.clone() },
    ];
    let mut basis = vec!["ket0".to_string()];
    for k in 1..d {
        let label = format!("b{k}");
        states.push(LabeledState { label: label.clone(), state: fam.basis.vectors()[k].clone() });
        basis.push(label);
    }
    let measurements = vec![
        LabeledMeasurement { label: "B".into(), povm: Povm::from_onb(&fam.basis, basis_labels(d))? },
        antidist_measurement("A", [("psi", &fam.psi), ("phi", &fam.phi), ("ket0", &fam.ket0)])?,
    ];
    let u = build_stabilizer_unitary(&fam.psi, &fam.ket0, &fam.phi)?;
    Scenario::new(states, measurements, epsilon)?
        .with_unitary("U", u)?
        .with_link(StabilizerLink { fixed: "psi".into(), from: "ket0".into(), to: "phi".into(), unitary: Some("U".into()) })?
        .with_basis(basis)
}

/// Vertex count of the second-theorem scenario restricted to the vertices
/// `psi` can use: three basis outcomes times two outcomes per
/// anti-distinguishing measurement.
pub fn thm2_vertex_estimate(d: usize) -> f64 {
    let n = d.saturating_sub(3) as f64;
    let triples = n + n * (n - 1.0) / 2.0;
    3.0 * 2f64.powf(triples)
}

/// The prepare-and-measure scenario behind the second overlap theorem.
///
/// States: `psi`, `ket0`, `phi3, ..., phi{d-1}`. Measurements: the basis
/// measurement `B` and one anti-distinguishing measurement for each
/// required triple. A stabilizer link records, for each `i`, a unitary
/// fixing `psi` and sending `ket0` to `phi{i}`.
///
/// The triples `{ket0, psi, phi_i}` are images of one another under basis
/// permutations that fix `e_0, e_1, e_2`, and so are the triples
/// `{psi, phi_i, phi_j}`; one measurement of each kind is synthesized and the
/// others are obtained by permuting it.
pub fn thm2_scenario(alpha: f64, d: usize, epsilon: f64) -> Result<Scenario> {
    let limit = tolerances().vertex_limit;
    let estimate = thm2_vertex_estimate(d);
    if estimate > limit as f64 {
        return Err(Error::TooLarge { count: estimate, limit });
    }
    let fam = build_thm2(alpha, d)?;
    let phi_label = |i: usize| format!("phi{i}");
    let mut states = vec![
        LabeledState { label: "psi".into(), state: fam.psi.clone() },
        LabeledState { label: "ket0".into(), state: fam.ket0.clone() },
    ];
    for (n, phi) in fam.phis.iter().enumerate() {
        states.push(LabeledState { label: phi_label(n + 3), state: phi.clone() });
    }
    let mut measurements =
        vec![LabeledMeasurement { label: "B".into(), povm: Povm::from_onb(&fam.basis, basis_labels(d))? }];

    let swap = |a: usize, b: usize| -> Vec<usize> {
        (0..d).map(|j| if j == a { b } else if j == b { a } else { j }).collect()
    };
    let base_single = antidist_measurement("A_ket0_psi_phi3", [("ket0", &fam.ket0), ("psi", &fam.psi), ("phi3", &fam.phis[0])])?;
    for i in 3..d {
        let label = format!("A_ket0_psi_{}", phi_label(i));
        let outcomes = vec!["not_ket0".to_string(), "not_psi".to_string(), format!("not_{}", phi_label(i))];
        let povm = permute_povm(&base_single.povm, &swap(3, i), outcomes)?;
        measurements.push(LabeledMeasurement { label, povm });
    }
    if d >= 5 {
        let base_pair =
            antidist_measurement("A_psi_phi3_phi4", [("psi", &fam.psi), ("phi3", &fam.phis[0]), ("phi4", &fam.phis[1])])?;
        for i in 3..d {
            for j in i + 1..d {
                // e3 -> e_i, e4 -> e_j, and the displaced basis vectors fill the gaps
                let mut perm: Vec<usize> = (0..d).collect();
                let mut rest: Vec<usize> = (3..d).filter(|&k| k != i && k != j).collect();
                perm[3] = i;
                perm[4] = j;
                for slot in perm.iter_mut().skip(5) {
                    *slot = rest.remove(0);
                }
                let label = format!("A_psi_{}_{}", phi_label(i), phi_label(j));
                let outcomes =
                    vec!["not_psi".to_string(), format!("not_{}", phi_label(i)), format!("not_{}", phi_label(j))];
                let povm = permute_povm(&base_pair.povm, &perm, outcomes)?;
                measurements.push(LabeledMeasurement { label, povm });
            }
        }
    }

    let mut scenario = Scenario::new(states, measurements, epsilon)?;
    for (n, phi) in fam.phis.iter().enumerate() {
        let i = n + 3;
        let u = build_stabilizer_unitary(&fam.psi, &fam.ket0, phi)?;
        let name = format!("U{i}");
        scenario = scenario.with_unitary(&name, u)?.with_link(StabilizerLink {
            fixed: "psi".into(),
            from: "ket0".into(),
            to: phi_label(i),
            unitary: Some(name),
        })?;
    }
    Ok(scenario)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm2Row {
    pub d: usize,
    pub lp_upper: f64,
    pub analytic: f64,
    pub within_bound: bool,
    pub vertices: usize,
}

/// Solves the asymmetric upper-bound LP for `ket0` against `psi` in the
/// second-theorem scenario for each dimension, next to the analytic bound.
pub fn reproduce_thm2(alpha: f64, dims: &[usize]) -> Result<Vec<Thm2Row>> {
    dims.iter()
        .map(|&d| {
            let analytic = thm2_bound(alpha, d)?;
            let scenario = thm2_scenario(alpha, d, 0.0)?;
            let r = max_asymmetric_overlap_upper(&scenario, "ket0", "psi", AsymmetricOptions::default())?;
            let lp_upper = r
                .value
                .ok_or_else(|| Error::NumericalFailure(format!("second-theorem LP at d={d} is {:?}", r.status)))?;
            Ok(Thm2Row { d, lp_upper, analytic, within_bound: lp_upper <= analytic + 1e-6, vertices: r.vertices })
        })
        .collect()
}
