//! Shared generators, brute-force oracles and property suites.
//!
//! Every suite draws from a generator seeded with [`SEED`] and returns a
//! one-line summary on success or a description of the first failure.

#![allow(dead_code)]

use std::collections::BTreeMap;

use onticlab::constructions::{antidist_criterion, triple_overlaps};
use onticlab::hilbert::{complete_onb, inner_product};
use onticlab::lp::LpStatus;
use onticlab::ontomodel::{
    apply_map, asymmetric_overlap, audit_model, multipartite_asymmetric_overlap, spekkens_toy_bit,
    symmetric_overlap, tripartite_symmetric_overlap, OnticModel, OnticSpace, PrepDistribution, StochasticMap,
};
use onticlab::overlap_lp::{
    achievable_outcomes, max_asymmetric_overlap_upper, max_symmetric_overlap, product_model, AsymmetricOptions,
};
use onticlab::povm::{
    discrimination_error, helstrom_bound, helstrom_measurement, synthesize_antidistinguishing,
};
use onticlab::scenario::{LabeledMeasurement, LabeledState};
use onticlab::{Onb, Operator, Povm, Scenario, StateVector, C64};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const SEED: u64 = 42;

pub type Suite = Result<String, String>;

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

pub fn random_state(rng: &mut ChaCha8Rng, d: usize) -> StateVector {
    let amps = (0..d).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    StateVector::normalized(amps).unwrap()
}

pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize, zero_prob: f64) -> PrepDistribution {
    let mut w: Vec<f64> = (0..n).map(|_| if rng.gen_bool(zero_prob) { 0.0 } else { rng.gen::<f64>() }).collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    PrepDistribution::normalized(w).unwrap()
}

pub fn random_kernel(rng: &mut ChaCha8Rng, n: usize) -> StochasticMap {
    let cols: Vec<Vec<f64>> = (0..n).map(|_| random_distribution(rng, n, 0.4).weights().to_vec()).collect();
    let kernel = (0..n).map(|to| (0..n).map(|from| cols[from][to]).collect()).collect();
    StochasticMap::new(kernel).unwrap()
}

pub fn labeled(label: &str, state: StateVector) -> LabeledState {
    LabeledState { label: label.to_string(), state }
}

/// Basis measurement whose first outcome projects onto `state`.
pub fn onb_containing(name: &str, label: &str, state: &StateVector) -> LabeledMeasurement {
    let onb = complete_onb(std::slice::from_ref(state), state.dim()).unwrap();
    let mut labels = vec![label.to_string()];
    labels.extend((1..state.dim()).map(|k| format!("{name}{k}")));
    LabeledMeasurement { label: name.to_string(), povm: Povm::from_onb(&onb, labels).unwrap() }
}

pub fn random_onb_measurement(rng: &mut ChaCha8Rng, name: &str, d: usize) -> LabeledMeasurement {
    let v = random_state(rng, d);
    onb_containing(name, &format!("{name}0"), &v)
}

/// Three random states in `C^d` passing the exact anti-distinguishability criterion.
pub fn random_certified_triple(rng: &mut ChaCha8Rng, d: usize) -> [StateVector; 3] {
    loop {
        let t = [random_state(rng, d), random_state(rng, d), random_state(rng, d)];
        let (a, b, c) = triple_overlaps(&t[0], &t[1], &t[2]).unwrap();
        if antidist_criterion(a, b, c).unwrap() {
            return t;
        }
    }
}

pub fn antidist(name: &str, labels: [&str; 3], states: &[StateVector; 3], tol: f64) -> Result<LabeledMeasurement, String> {
    let povm = synthesize_antidistinguishing(states, 200_000, tol).map_err(|e| e.to_string())?;
    let labels = labels.iter().map(|l| format!("not_{l}")).collect();
    Ok(LabeledMeasurement { label: name.to_string(), povm: Povm::new(povm.elements().to_vec(), labels).unwrap() })
}

fn fail(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_eq6(model: &OnticModel, sc: &Scenario, tag: &str) -> Result<usize, String> {
    let report = audit_model(model, sc).map_err(|e| e.to_string())?;
    fail(report.pass, || format!("{tag}: model fails audit ({})", report.max_deviation))?;
    let mut n = 0;
    for psi in sc.states() {
        for phi in sc.states() {
            let born = inner_product(&phi.state, &psi.state).unwrap().norm_sqr();
            for mu in model.preps(&psi.label).unwrap() {
                let v = asymmetric_overlap(model, &phi.label, mu).unwrap();
                fail(v <= born + 1e-9, || format!("{tag}: overlap({}|{}) = {v} > {born}", phi.label, psi.label))?;
                n += 1;
            }
        }
    }
    Ok(n)
}

/// Scenario on random states in which every state has a basis measurement
/// containing it.
fn random_covered_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let d = rng.gen_range(2..=3);
    let n = rng.gen_range(2..=3);
    let states: Vec<LabeledState> = (0..n).map(|k| labeled(&format!("s{k}"), random_state(rng, d))).collect();
    let measurements =
        states.iter().enumerate().map(|(k, s)| onb_containing(&format!("M{k}"), &s.label, &s.state)).collect();
    Scenario::new(states, measurements, 0.0).unwrap()
}

/// Asymmetric overlap never exceeds the Born probability in exactly
/// reproducing models whose scenario measures each target in a basis.
pub fn eq6_models(rng: &mut ChaCha8Rng) -> Suite {
    let (toy, toy_sc) = spekkens_toy_bit();
    let mut pairs = check_eq6(&toy, &toy_sc, "toy bit")?;
    let mut models = 1;
    for case in 0..30 {
        let sc = random_covered_scenario(rng);
        let model = product_model(&sc).map_err(|e| e.to_string())?;
        pairs += check_eq6(&model, &sc, &format!("product model {case}"))?;
        models += 1;
        if case % 3 == 0 {
            let w = max_symmetric_overlap(&sc, "s0", "s1").map_err(|e| e.to_string())?;
            let model = w.model.ok_or("symmetric LP returned no witness")?;
            pairs += check_eq6(&model, &sc, &format!("witness model {case}"))?;
            models += 1;
        }
    }
    Ok(format!("{models} models, {pairs} state pairs"))
}

/// `max_symmetric <= max_asymmetric_upper <= |<s2|s1>|^2`, witness audits,
/// and both optima nondecreasing in epsilon.
pub fn lp_chain(rng: &mut ChaCha8Rng) -> Suite {
    let cases = 25;
    for case in 0..cases {
        let d = rng.gen_range(2..=3);
        let s1 = random_state(rng, d);
        let s2 = random_state(rng, d);
        let born = inner_product(&s2, &s1).unwrap().norm_sqr();
        let mut measurements = vec![onb_containing("M", "s2", &s2)];
        if rng.gen_bool(0.5) {
            measurements.push(random_onb_measurement(rng, "R", d));
        }
        let base = Scenario::new(vec![labeled("s1", s1), labeled("s2", s2)], measurements, 0.0).unwrap();
        let mut prev = (0.0f64, 0.0f64);
        for eps in [0.0, 0.01, 0.05] {
            let sc = base.clone().with_epsilon(eps).unwrap();
            let sym = max_symmetric_overlap(&sc, "s1", "s2").map_err(|e| e.to_string())?;
            let asym = max_asymmetric_overlap_upper(&sc, "s2", "s1", AsymmetricOptions::default())
                .map_err(|e| e.to_string())?;
            let (sv, av) = (sym.value.ok_or("symmetric LP infeasible")?, asym.value.ok_or("asymmetric LP infeasible")?);
            fail(sv <= av + 1e-9, || format!("case {case} eps {eps}: symmetric {sv} > asymmetric {av}"))?;
            if eps == 0.0 {
                fail(av <= born + 1e-6, || format!("case {case}: asymmetric {av} > Born {born}"))?;
            }
            fail(sv >= prev.0 - 1e-9 && av >= prev.1 - 1e-9, || format!("case {case}: optimum decreased at eps {eps}"))?;
            prev = (sv, av);
            let report = audit_model(&sym.model.unwrap(), &sc).map_err(|e| e.to_string())?;
            fail(report.pass, || format!("case {case} eps {eps}: witness fails audit ({})", report.max_deviation))?;
        }
    }
    Ok(format!("{cases} scenarios x 3 epsilons"))
}

/// With the Helstrom measurement in the scenario, the symmetric optimum is
/// below `1 - sqrt(1 - |<s2|s1>|^2)`.
pub fn helstrom_lp(rng: &mut ChaCha8Rng) -> Suite {
    let cases = 20;
    for case in 0..cases {
        let d = rng.gen_range(2..=4);
        let (s1, s2) = (random_state(rng, d), random_state(rng, d));
        let bound = helstrom_bound(inner_product(&s2, &s1).unwrap().norm_sqr()).unwrap();
        let h = helstrom_measurement(&s1, &s2).map_err(|e| e.to_string())?;
        let h = Povm::new(h.elements().to_vec(), vec!["s1".into(), "s2".into()]).unwrap();
        let mut ms = vec![LabeledMeasurement { label: "H".into(), povm: h }];
        if rng.gen_bool(0.5) {
            ms.push(random_onb_measurement(rng, "R", d));
        }
        let sc = Scenario::new(vec![labeled("s1", s1), labeled("s2", s2)], ms, 0.0).unwrap();
        let v = max_symmetric_overlap(&sc, "s1", "s2").map_err(|e| e.to_string())?.value.ok_or("infeasible")?;
        fail(v <= bound + 1e-6, || format!("case {case}: {v} > Helstrom ceiling {bound}"))?;
    }
    Ok(format!("{cases} scenarios"))
}

/// Boole's inequality for multipartite overlaps, with equality when every
/// relevant triple is anti-distinguished by a scenario measurement.
pub fn boole(rng: &mut ChaCha8Rng) -> Suite {
    for case in 0..100 {
        let n = rng.gen_range(2..=8);
        let space = OnticSpace::numbered(n).unwrap();
        let mut preps = BTreeMap::new();
        for l in ["a", "b", "c"] {
            preps.insert(l.to_string(), vec![random_distribution(rng, n, 0.5)]);
        }
        let model = OnticModel::new(space, preps, BTreeMap::new(), BTreeMap::new()).unwrap();
        let mu = random_distribution(rng, n, 0.3);
        let joint = multipartite_asymmetric_overlap(&model, &["a", "b", "c"], &mu).unwrap();
        let sum: f64 = ["a", "b", "c"].iter().map(|t| asymmetric_overlap(&model, t, &mu).unwrap()).sum();
        fail(joint <= sum + 1e-12, || format!("random model {case}: {joint} > {sum}"))?;
    }
    let certified = 15;
    for case in 0..certified {
        let t = random_certified_triple(rng, 4);
        let a = antidist("A", ["psi", "a", "b"], &t, 1e-12)?;
        let [psi, sa, sb] = t;
        let sc = Scenario::new(
            vec![labeled("psi", psi), labeled("a", sa), labeled("b", sb)],
            vec![a, LabeledMeasurement { label: "Z".into(), povm: Povm::from_onb(&Onb::standard(4).unwrap(), (0..4).map(|k| k.to_string()).collect()).unwrap() }],
            0.0,
        )
        .unwrap();
        let model = product_model(&sc).map_err(|e| e.to_string())?;
        let report = audit_model(&model, &sc).map_err(|e| e.to_string())?;
        fail(report.pass, || format!("certified case {case}: audit fails"))?;
        let mu = &model.preps("psi").unwrap()[0];
        let joint = multipartite_asymmetric_overlap(&model, &["a", "b"], mu).unwrap();
        let sum = asymmetric_overlap(&model, "a", mu).unwrap() + asymmetric_overlap(&model, "b", mu).unwrap();
        fail((joint - sum).abs() <= 1e-9, || format!("certified case {case}: {joint} != {sum}"))?;
    }
    Ok(format!("100 random models, {certified} certified triples"))
}

pub fn monotonicity(rng: &mut ChaCha8Rng) -> Suite {
    for case in 0..200 {
        let n = rng.gen_range(2..=8);
        let g = random_kernel(rng, n);
        let mu = random_distribution(rng, n, 0.3);
        let nu = random_distribution(rng, n, 0.3);
        let before = symmetric_overlap(&mu, &nu).unwrap();
        let after = symmetric_overlap(&apply_map(&g, &mu).unwrap(), &apply_map(&g, &nu).unwrap()).unwrap();
        fail(after >= before - 1e-12, || format!("kernel {case}: {after} < {before}"))?;
    }
    Ok("200 random kernels".into())
}

pub fn tripartite_pairwise(rng: &mut ChaCha8Rng) -> Suite {
    for case in 0..200 {
        let n = rng.gen_range(1..=8);
        let d: Vec<PrepDistribution> = (0..3).map(|_| random_distribution(rng, n, 0.3)).collect();
        let tri = tripartite_symmetric_overlap(&d[0], &d[1], &d[2]).unwrap();
        let pairs = [(0, 1), (0, 2), (1, 2)].map(|(i, j)| symmetric_overlap(&d[i], &d[j]).unwrap());
        fail((0.0..=1.0).contains(&tri), || format!("case {case}: tripartite {tri} outside [0,1]"))?;
        for p in pairs {
            fail((0.0..=1.0).contains(&p), || format!("case {case}: pairwise {p} outside [0,1]"))?;
            fail(tri <= p + 1e-15, || format!("case {case}: tripartite {tri} > pairwise {p}"))?;
        }
    }
    Ok("200 random triples".into())
}

/// Tripartite overlap of an anti-distinguishable triple is at most `3 eps`
/// in any model that passes the audit at `eps`.
pub fn tripartite_noise(rng: &mut ChaCha8Rng) -> Suite {
    let cases = 30;
    for case in 0..cases {
        let d = rng.gen_range(3..=4);
        let t = random_certified_triple(rng, d);
        let eps = rng.gen_range(0.001..0.05);
        let a = antidist("A", ["t0", "t1", "t2"], &t, 1e-10)?;
        let r = random_onb_measurement(rng, "R", d);
        let states = t.iter().enumerate().map(|(k, s)| labeled(&format!("t{k}"), s.clone())).collect();
        let sc = Scenario::new(states, vec![a, r], eps).unwrap();
        let counts = sc.outcome_counts();
        let space = OnticSpace::numbered(counts[0] * counts[1]).unwrap();
        let mut preps = BTreeMap::new();
        for k in 0..3 {
            // each marginal moves towards a random distribution by at most eps/2
            let rows: Vec<Vec<f64>> = (0..2)
                .map(|m| {
                    let q = random_distribution(rng, counts[m], 0.0);
                    sc.born().row(k, m).iter().zip(q.weights()).map(|(b, q)| (1.0 - eps / 2.0) * b + eps / 2.0 * q).collect()
                })
                .collect();
            let w = (0..counts[0] * counts[1]).map(|v| rows[0][v / counts[1]] * rows[1][v % counts[1]]).collect();
            preps.insert(format!("t{k}"), vec![PrepDistribution::normalized(w).unwrap()]);
        }
        let resp = |m: usize| {
            let assign: Vec<usize> =
                (0..counts[0] * counts[1]).map(|v| if m == 0 { v / counts[1] } else { v % counts[1] }).collect();
            vec![onticlab::ontomodel::ResponseFunction::deterministic(counts[m], &assign).unwrap()]
        };
        let responses = BTreeMap::from([("A".to_string(), resp(0)), ("R".to_string(), resp(1))]);
        let model = OnticModel::new(space, preps, responses, BTreeMap::new()).unwrap();
        let report = audit_model(&model, &sc).map_err(|e| e.to_string())?;
        fail(report.pass, || format!("case {case}: constructed model fails audit at eps {eps}"))?;
        let p = |k: usize| &model.preps(&format!("t{k}")).unwrap()[0];
        let tri = tripartite_symmetric_overlap(p(0), p(1), p(2)).unwrap();
        fail(tri <= 3.0 * eps + 1e-9, || format!("case {case}: tripartite {tri} > 3 eps = {}", 3.0 * eps))?;
    }
    Ok(format!("{cases} audited models"))
}

pub fn helstrom_error(rng: &mut ChaCha8Rng) -> Suite {
    let cases = 200;
    for case in 0..cases {
        let d = rng.gen_range(2..=6);
        let (a, b) = (random_state(rng, d), random_state(rng, d));
        let h = helstrom_measurement(&a, &b).map_err(|e| e.to_string())?;
        let err = discrimination_error(&h, &a, &b).unwrap();
        let bound = helstrom_bound(inner_product(&a, &b).unwrap().norm_sqr()).unwrap();
        fail((err - bound / 2.0).abs() < 1e-8, || format!("pair {case}: error {err} vs bound/2 {}", bound / 2.0))?;
    }
    Ok(format!("{cases} random pairs"))
}

// ---------------------------------------------------------------------------
// Grid brute force

pub const GRID: i64 = 200;

/// A scenario whose Born probabilities and epsilon are multiples of `1/GRID`.
pub struct OracleCase {
    pub scenario: Scenario,
    pub shape: Vec<usize>,
}

fn random_grid_state(rng: &mut ChaCha8Rng, d: usize) -> StateVector {
    let mut live: Vec<usize> = (0..d).filter(|_| rng.gen_bool(0.45)).collect();
    if live.is_empty() {
        live.push(rng.gen_range(0..d));
    }
    let mut cuts: Vec<i64> = (0..live.len() - 1).map(|_| rng.gen_range(0..=GRID)).collect();
    cuts.push(0);
    cuts.push(GRID);
    cuts.sort_unstable();
    let mut amps = vec![C64::new(0.0, 0.0); d];
    for (n, &i) in live.iter().enumerate() {
        let p = (cuts[n + 1] - cuts[n]) as f64 / GRID as f64;
        amps[i] = C64::from_polar(p.sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
    }
    if amps.iter().all(|a| a.norm_sqr() == 0.0) {
        amps[live[0]] = C64::new(1.0, 0.0);
    }
    StateVector::new(amps).unwrap()
}

/// Coarse-grained standard-basis measurement with `k` outcomes.
fn random_partition_measurement(rng: &mut ChaCha8Rng, name: &str, d: usize, k: usize) -> LabeledMeasurement {
    let mut idx: Vec<usize> = (0..d).collect();
    idx.shuffle(rng);
    let mut group = vec![0usize; d];
    for (n, &i) in idx.iter().enumerate() {
        group[i] = if n < k { n } else { rng.gen_range(0..k) };
    }
    let elements =
        (0..k).map(|g| Operator::diagonal(&group.iter().map(|&x| if x == g { 1.0 } else { 0.0 }).collect::<Vec<_>>())).collect();
    let labels = (0..k).map(|g| format!("{name}{g}")).collect();
    LabeledMeasurement { label: name.to_string(), povm: Povm::new(elements, labels).unwrap() }
}

pub fn oracle_cases(rng: &mut ChaCha8Rng, n: usize) -> Vec<OracleCase> {
    (0..n)
        .map(|case| {
            let (shape, eps_choices): (Vec<usize>, &[f64]) = match case % 4 {
                0 => (vec![rng.gen_range(2..=6)], &[0.0, 0.01, 0.025]),
                1 => (vec![2, 2], &[0.0, 0.01]),
                2 => (vec![2, 3], &[0.0]),
                _ => (vec![rng.gen_range(3..=6)], &[0.0, 0.025]),
            };
            let d = shape.iter().copied().max().unwrap().max(3) + rng.gen_range(0..=2);
            let eps = *eps_choices.choose(rng).unwrap();
            let states = (0..3).map(|k| labeled(&format!("s{k}"), random_grid_state(rng, d))).collect();
            let ms = shape.iter().enumerate().map(|(m, &k)| random_partition_measurement(rng, &format!("M{m}_"), d, k)).collect();
            OracleCase { scenario: Scenario::new(states, ms, eps).unwrap(), shape }
        })
        .collect()
}

fn vertices_of(shape: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &k in shape {
        out = out.into_iter().flat_map(|v: Vec<usize>| (0..k).map(move |o| [v.clone(), vec![o]].concat())).collect();
    }
    out
}

/// All integer vectors over the vertices summing to `GRID` whose marginals
/// stay within `eps` of the state's Born rows, in units of `1/GRID`.
pub fn grid_distributions(sc: &Scenario, state: usize, shape: &[usize]) -> Vec<Vec<i64>> {
    let verts = vertices_of(shape);
    let e = (sc.epsilon() * GRID as f64).round() as i64;
    let target: Vec<Vec<i64>> =
        (0..shape.len()).map(|m| sc.born().row(state, m).iter().map(|b| (b * GRID as f64).round() as i64).collect()).collect();
    let mut out = Vec::new();
    let mut x = vec![0i64; verts.len()];
    let mut sums: Vec<Vec<i64>> = shape.iter().map(|&k| vec![0; k]).collect();
    fn rec(
        i: usize,
        left: i64,
        verts: &[Vec<usize>],
        target: &[Vec<i64>],
        e: i64,
        x: &mut Vec<i64>,
        sums: &mut Vec<Vec<i64>>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if i == verts.len() {
            if left == 0 && sums.iter().zip(target).all(|(s, t)| s.iter().zip(t).all(|(a, b)| (a - b).abs() <= e)) {
                out.push(x.clone());
            }
            return;
        }
        let cap = verts[i].iter().enumerate().map(|(m, &o)| target[m][o] + e - sums[m][o]).min().unwrap_or(left).min(left);
        let lo = if i + 1 == verts.len() { left } else { 0 };
        for v in lo..=cap.max(-1) {
            x[i] = v;
            for (m, &o) in verts[i].iter().enumerate() {
                sums[m][o] += v;
            }
            rec(i + 1, left - v, verts, target, e, x, sums, out);
            for (m, &o) in verts[i].iter().enumerate() {
                sums[m][o] -= v;
            }
        }
        x[i] = 0;
    }
    rec(0, GRID, &verts, &target, e, &mut x, &mut sums, &mut out);
    out
}

pub struct OracleOutcome {
    pub asymmetric: (f64, f64),
    pub symmetric: Option<(f64, f64)>,
    pub usable_match: bool,
}

pub fn run_oracle_case(case: &OracleCase) -> Result<OracleOutcome, String> {
    let sc = &case.scenario;
    let verts = vertices_of(&case.shape);
    let f0 = grid_distributions(sc, 0, &case.shape);
    let f1 = grid_distributions(sc, 1, &case.shape);
    if f0.is_empty() || f1.is_empty() {
        return Err("grid has no reproducing distribution".into());
    }

    let support: Vec<bool> = (0..verts.len()).map(|v| f1.iter().any(|x| x[v] > 0)).collect();
    let brute_asym = f0.iter().map(|x| (0..verts.len()).filter(|&v| support[v]).map(|v| x[v]).sum::<i64>()).max().unwrap();
    let lp_asym = max_asymmetric_overlap_upper(sc, "s1", "s0", AsymmetricOptions::default()).map_err(|e| e.to_string())?;
    if lp_asym.status != LpStatus::Optimal {
        return Err(format!("asymmetric LP {:?}", lp_asym.status));
    }

    let ach = achievable_outcomes(sc, "s1").map_err(|e| e.to_string())?;
    let usable: Vec<bool> = verts.iter().map(|v| v.iter().enumerate().all(|(m, &o)| ach[m][o])).collect();

    let symmetric = if (f0.len() as f64) * (f1.len() as f64) <= 3e7 {
        let mut best = 0i64;
        for x in &f0 {
            for y in &f1 {
                best = best.max(x.iter().zip(y).map(|(a, b)| *a.min(b)).sum());
            }
        }
        let lp = max_symmetric_overlap(sc, "s0", "s1").map_err(|e| e.to_string())?;
        Some((lp.value.ok_or("symmetric LP infeasible")?, best as f64 / GRID as f64))
    } else {
        None
    };
    Ok(OracleOutcome {
        asymmetric: (lp_asym.value.unwrap(), brute_asym as f64 / GRID as f64),
        symmetric,
        usable_match: usable == support,
    })
}

/// LP optima against grid search on small scenarios.
pub fn oracle_suite(rng: &mut ChaCha8Rng, n: usize) -> Suite {
    let mut worst = 0.0f64;
    let mut sym = 0;
    for (i, case) in oracle_cases(rng, n).iter().enumerate() {
        let out = run_oracle_case(case).map_err(|e| format!("case {i}: {e}"))?;
        let da = (out.asymmetric.0 - out.asymmetric.1).abs();
        fail(da <= 5e-3, || format!("case {i}: asymmetric LP {} vs grid {}", out.asymmetric.0, out.asymmetric.1))?;
        fail(out.usable_match, || format!("case {i}: usable vertices differ from grid supports"))?;
        worst = worst.max(da);
        if let Some((lp, brute)) = out.symmetric {
            fail((lp - brute).abs() <= 5e-3, || format!("case {i}: symmetric LP {lp} vs grid {brute}"))?;
            worst = worst.max((lp - brute).abs());
            sym += 1;
        }
    }
    Ok(format!("{n} scenarios ({sym} with symmetric check), worst gap {worst:.2e}"))
}
