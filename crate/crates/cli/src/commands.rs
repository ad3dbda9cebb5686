use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use onticlab::bounds::{
    default_alpha_sq_grid, improvement_region_on, symmetric_trivial_bound, thm1_bound, thm2_bound, thm3_bound,
    to_csv,
};
use onticlab::constructions::{
    antidist_criterion_with_slack, build_thm1, build_thm2, overlap_matrix, triple_overlaps, Coefficients,
    CRITERION_SLACK,
};
use onticlab::hilbert::inner_product;
use onticlab::lp::LpStatus;
use onticlab::ontomodel::{
    audit_model, classify_superposition, exclusive_support, spekkens_toy_bit, AuditEntry, OnticModel, Verdict,
};
use onticlab::overlap_lp::{
    max_asymmetric_overlap_upper, max_symmetric_overlap, thm1_scenario, thm2_scenario, AsymmetricOptions,
};
use onticlab::povm::{synthesize_antidistinguishing, verify_antidistinguishing, AntidistReport};
use onticlab::{Error, Povm, Scenario, StateVector};
use serde::Serialize;

use crate::{
    AuditArgs, BoundsArgs, ClassifyArgs, ConstructArgs, Format, LpArgs, OutArg, SynthArgs, TripleArgs, TripleSource,
};

fn emit(text: &str, out: &OutArg) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &out.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: &OutArg) -> Result<()> {
    emit(&serde_json::to_string_pretty(value)?, out)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn dimension(value: f64) -> Result<usize> {
    if value.fract() != 0.0 || value < 0.0 {
        bail!("dimension must be a nonnegative integer, got {value}");
    }
    Ok(value as usize)
}

#[derive(Serialize)]
struct Labeled<'a> {
    label: String,
    state: &'a StateVector,
}

#[derive(Serialize)]
struct TripleVerdict {
    triple: [String; 3],
    overlaps: [f64; 3],
    anti_distinguishable: bool,
}

#[derive(Serialize)]
struct OverlapTable {
    labels: Vec<String>,
    /// `|<i|j>|^2`
    matrix: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct ConstructReport<'a> {
    theorem: u8,
    alpha: f64,
    alpha_sq: f64,
    d: usize,
    coefficients: Coefficients,
    basis: Vec<Labeled<'a>>,
    states: Vec<Labeled<'a>>,
    overlaps: OverlapTable,
    criteria: Vec<TripleVerdict>,
}

fn verdict(labels: [&str; 3], states: [&StateVector; 3]) -> Result<TripleVerdict> {
    let (a, b, c) = triple_overlaps(states[0], states[1], states[2])?;
    Ok(TripleVerdict {
        triple: labels.map(String::from),
        overlaps: [a, b, c],
        anti_distinguishable: antidist_criterion_with_slack(a, b, c, CRITERION_SLACK)?,
    })
}

fn basis_label(k: usize) -> String {
    if k == 0 {
        "0".into()
    } else {
        format!("{k}'")
    }
}

pub fn construct(args: ConstructArgs) -> Result<bool> {
    let alpha = match (args.alpha, args.alpha_sq) {
        (Some(a), _) => a,
        (None, Some(a2)) if a2 >= 0.0 => a2.sqrt(),
        (None, Some(a2)) => return Err(Error::OutOfRange { name: "alpha_sq", value: a2 }.into()),
        (None, None) => bail!("one of --alpha and --alpha-sq is required"),
    };
    let d = args.d;
    let (coefficients, basis, labels, states, criteria) = if args.theorem == 1 {
        let f = build_thm1(alpha, d)?;
        let criteria = vec![verdict(["psi", "phi", "ket0"], [&f.psi, &f.phi, &f.ket0])?];
        let states = vec![f.psi.clone(), f.phi.clone(), f.ket0.clone()];
        (f.coeffs, f.basis, vec!["psi".to_string(), "phi".into(), "ket0".into()], states, criteria)
    } else {
        let f = build_thm2(alpha, d)?;
        let states = f.states();
        let mut labels = vec!["psi".to_string(), "ket0".into()];
        labels.extend((3..d).map(|i| format!("phi{i}")));
        let criteria = f
            .required_triples()
            .into_iter()
            .map(|[i, j, k]| {
                verdict([&labels[i], &labels[j], &labels[k]], [&states[i], &states[j], &states[k]])
            })
            .collect::<Result<Vec<_>>>()?;
        (f.coeffs, f.basis, labels, states, criteria)
    };
    let report = ConstructReport {
        theorem: args.theorem,
        alpha,
        alpha_sq: alpha * alpha,
        d,
        coefficients,
        basis: basis.vectors().iter().enumerate().map(|(k, v)| Labeled { label: basis_label(k), state: v }).collect(),
        states: labels.iter().zip(&states).map(|(l, s)| Labeled { label: l.clone(), state: s }).collect(),
        overlaps: OverlapTable { labels: labels.clone(), matrix: overlap_matrix(&states)? },
        criteria,
    };
    emit_json(&report, &args.out)?;
    Ok(true)
}

enum Triple {
    States([StateVector; 3]),
    Overlaps(f64, f64, f64),
}

fn triple(src: &TripleSource) -> Result<Triple> {
    if let Some(path) = &src.states {
        let states: Vec<StateVector> =
            serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        let states: [StateVector; 3] =
            states.try_into().map_err(|v: Vec<_>| Error::ArityMismatch { expected: 3, found: v.len() })?;
        return Ok(Triple::States(states));
    }
    if let Some(v) = &src.thm1 {
        return Ok(Triple::States(build_thm1(v[0], dimension(v[1])?)?.triple()));
    }
    if let Some(v) = &src.overlaps {
        return Ok(Triple::Overlaps(v[0], v[1], v[2]));
    }
    bail!("no triple given")
}

#[derive(Serialize)]
struct CriterionReport {
    overlaps: [f64; 3],
    sum: f64,
    /// `(1 - a - b - c)^2 - 4abc`
    discriminant: f64,
    anti_distinguishable: bool,
}

pub fn check_antidist(args: TripleArgs) -> Result<bool> {
    let (a, b, c) = match triple(&args.source)? {
        Triple::States(s) => triple_overlaps(&s[0], &s[1], &s[2])?,
        Triple::Overlaps(a, b, c) => (a, b, c),
    };
    let ok = antidist_criterion_with_slack(a, b, c, CRITERION_SLACK)?;
    let s = a + b + c;
    let report = CriterionReport {
        overlaps: [a, b, c],
        sum: s,
        discriminant: (1.0 - s).powi(2) - 4.0 * a * b * c,
        anti_distinguishable: ok,
    };
    emit_json(&report, &args.out)?;
    Ok(ok)
}

#[derive(Serialize)]
struct SynthReport {
    povm: Povm,
    verification: AntidistReport,
}

pub fn synth_povm(args: SynthArgs) -> Result<bool> {
    let Triple::States(states) = triple(&args.source)? else {
        bail!("synth-povm needs states, not overlaps");
    };
    let povm = match synthesize_antidistinguishing(&states, args.max_iters, args.tol) {
        Ok(p) => p,
        Err(e @ (Error::NoConvergence { .. } | Error::SynthesisFailed(_))) => {
            eprintln!("onticlab: {e}");
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    let verification = verify_antidistinguishing(&povm, &states, args.tol)?;
    let pass = verification.pass;
    emit_json(&SynthReport { povm, verification }, &args.out)?;
    Ok(pass)
}

#[derive(Serialize)]
struct ClassifyReport {
    state: String,
    basis: Vec<String>,
    verdict: Verdict,
    residual: f64,
    /// Ontic states reachable from the state but from no basis state.
    exclusive_support: Vec<String>,
}

fn classify_report(model: &OnticModel, psi: &str, basis: &[String]) -> Result<ClassifyReport> {
    let refs: Vec<&str> = basis.iter().map(String::as_str).collect();
    let c = classify_superposition(model, psi, &refs)?;
    Ok(ClassifyReport {
        state: psi.to_string(),
        basis: basis.to_vec(),
        verdict: c.verdict,
        residual: c.residual,
        exclusive_support: exclusive_support(model, psi, &refs)?,
    })
}

#[derive(Serialize)]
struct AuditOutput {
    pass: bool,
    max_deviation: f64,
    epsilon: f64,
    worst: Option<AuditEntry>,
    entries: Vec<AuditEntry>,
    classifications: Vec<ClassifyReport>,
}

fn load_model(path: &Path) -> Result<OnticModel> {
    OnticModel::from_json(&read(path)?).with_context(|| format!("loading model {}", path.display()))
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    Scenario::from_json(&read(path)?).with_context(|| format!("loading scenario {}", path.display()))
}

pub fn audit(args: AuditArgs) -> Result<bool> {
    let model = load_model(&args.model)?;
    let mut scenario = match &args.scenario {
        Some(p) => load_scenario(p)?,
        None => model.scenario().cloned().ok_or_else(|| anyhow!("model has no embedded scenario; pass --scenario"))?,
    };
    if let Some(eps) = args.epsilon {
        scenario = scenario.with_epsilon(eps)?;
    }
    let report = audit_model(&model, &scenario)?;
    let basis = scenario.basis().to_vec();
    let classifications = if basis.is_empty() {
        Vec::new()
    } else {
        scenario
            .states()
            .iter()
            .filter(|s| !basis.contains(&s.label))
            .map(|s| classify_report(&model, &s.label, &basis))
            .collect::<Result<_>>()?
    };
    let pass = report.pass;
    let out = AuditOutput {
        pass,
        max_deviation: report.max_deviation,
        epsilon: report.epsilon,
        worst: report.worst().cloned(),
        entries: report.entries,
        classifications,
    };
    emit_json(&out, &args.out)?;
    Ok(pass)
}

pub fn classify(args: ClassifyArgs) -> Result<bool> {
    let model = load_model(&args.model)?;
    let report = classify_report(&model, &args.psi, &args.basis)?;
    let epistemic = report.verdict == Verdict::Epistemic;
    emit_json(&report, &args.out)?;
    Ok(epistemic)
}

pub fn bounds_table(args: BoundsArgs) -> Result<bool> {
    let grid = args.alpha_sq.clone().unwrap_or_else(default_alpha_sq_grid);
    if grid.is_empty() {
        bail!("empty alpha^2 grid");
    }
    let rows = improvement_region_on(args.d, args.epsilon, &grid)?;
    match args.format {
        Format::Csv => emit(&to_csv(&rows), &args.out)?,
        Format::Json => emit_json(&rows, &args.out)?,
    }
    Ok(true)
}

#[derive(Serialize)]
struct LpReport {
    source: String,
    mode: &'static str,
    pair: [String; 2],
    epsilon: f64,
    status: LpStatus,
    value: Option<f64>,
    vertices: usize,
    variables: usize,
    pivots: usize,
    /// Closed-form ceilings applicable to the pair.
    analytic: BTreeMap<String, f64>,
    witness_model: Option<String>,
}

pub fn lp_max_overlap(args: LpArgs) -> Result<bool> {
    let src = &args.source;
    let eps = args.epsilon.unwrap_or(0.0);
    let mut analytic = BTreeMap::new();
    let psi_ket0 = args.pair == ["psi", "ket0"];
    let (source, mut scenario) = if let Some(p) = &src.scenario {
        let sc = load_scenario(p)?;
        (p.display().to_string(), sc)
    } else if let Some(v) = &src.thm1 {
        let (alpha, d) = (v[0], dimension(v[1])?);
        if psi_ket0 {
            analytic.insert("thm1".to_string(), thm1_bound(alpha)?);
        }
        (format!("thm1 alpha={alpha} d={d}"), thm1_scenario(alpha, d, eps)?)
    } else if let Some(v) = &src.thm2 {
        let (alpha, d) = (v[0], dimension(v[1])?);
        if psi_ket0 {
            analytic.insert("thm2".to_string(), thm2_bound(alpha, d)?);
            analytic.insert("thm3".to_string(), thm3_bound(alpha, d, eps)?);
        }
        (format!("thm2 alpha={alpha} d={d}"), thm2_scenario(alpha, d, eps)?)
    } else {
        bail!("no scenario given");
    };
    if let Some(e) = args.epsilon {
        scenario = scenario.with_epsilon(e)?;
    }
    let (s1, s2) = (&args.pair[0], &args.pair[1]);
    let born = inner_product(scenario.state(s2)?, scenario.state(s1)?)?.norm_sqr();
    analytic.insert("eq6".to_string(), born);
    analytic.insert("eq16".to_string(), symmetric_trivial_bound(born)?);

    let asymmetric = args.asymmetric || args.epistemic_constraint;
    let mut witness_model = None;
    let report = if asymmetric {
        let options = AsymmetricOptions { epistemic_constraint: args.epistemic_constraint };
        let r = max_asymmetric_overlap_upper(&scenario, s2, s1, options)?;
        LpReport {
            source,
            mode: "asymmetric",
            pair: [s1.clone(), s2.clone()],
            epsilon: r.epsilon,
            status: r.status,
            value: r.value,
            vertices: r.vertices,
            variables: r.variables,
            pivots: r.pivots,
            analytic,
            witness_model,
        }
    } else {
        let r = max_symmetric_overlap(&scenario, s1, s2)?;
        if let (Some(path), Some(model)) = (&args.witness_out, &r.model) {
            write_model(model, path)?;
            witness_model = Some(path.display().to_string());
        }
        LpReport {
            source,
            mode: "symmetric",
            pair: [s1.clone(), s2.clone()],
            epsilon: r.epsilon,
            status: r.status,
            value: r.value,
            vertices: r.vertices,
            variables: r.variables,
            pivots: r.pivots,
            analytic,
            witness_model,
        }
    };
    let optimal = report.status == LpStatus::Optimal;
    if report.status == LpStatus::Unbounded {
        bail!("LP reported unbounded");
    }
    emit_json(&report, &args.out)?;
    Ok(optimal)
}

fn write_model(model: &OnticModel, path: &PathBuf) -> Result<()> {
    let mut text = model.to_json()?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn toy_bit(args: OutArg) -> Result<bool> {
    let (model, scenario) = spekkens_toy_bit();
    emit(&model.with_scenario(scenario).to_json()?, &args)?;
    Ok(true)
}
