//! Acceptance criteria, one pass/fail line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown.

mod common;

use std::time::{Duration, Instant};

use common::*;
use onticlab::bounds::{improvement_region, thm1_bound};
use onticlab::constructions::{build_thm1, certify_triple};
use onticlab::hilbert::inner_product;
use onticlab::lp::LpStatus;
use onticlab::ontomodel::{audit_model, classify_superposition, spekkens_toy_bit, Verdict};
use onticlab::overlap_lp::{max_asymmetric_overlap_upper, reproduce_thm2, thm1_scenario, AsymmetricOptions};
use onticlab::povm::{synthesize_antidistinguishing, verify_antidistinguishing};

fn alpha_grid() -> Vec<f64> {
    (1..=50).map(|k| 0.01 + 0.69 * k as f64 / 51.0).collect()
}

fn construction_validity() -> Suite {
    for alpha in alpha_grid() {
        let f = build_thm1(alpha, 4).map_err(|e| format!("alpha {alpha}: {e}"))?;
        let a2 = alpha * alpha;
        let p0 = inner_product(&f.ket0, &f.psi).unwrap().norm_sqr();
        let pphi = inner_product(&f.phi, &f.psi).unwrap().norm_sqr();
        if (p0 - a2).abs() > 1e-9 || (pphi - a2).abs() > 1e-9 {
            return Err(format!("alpha {alpha}: overlaps {p0}, {pphi} vs {a2}"));
        }
        if !certify_triple(&f.psi, &f.phi, &f.ket0).unwrap() {
            return Err(format!("alpha {alpha}: triple fails the criterion"));
        }
    }
    Ok("50 alphas, overlaps within 1e-9, all triples certified".into())
}

fn antidist_synthesis() -> Suite {
    let mut worst = 0.0f64;
    for alpha in alpha_grid() {
        let t = build_thm1(alpha, 4).unwrap().triple();
        let povm = synthesize_antidistinguishing(&t, 200_000, 1e-8).map_err(|e| format!("alpha {alpha}: {e}"))?;
        let r = verify_antidistinguishing(&povm, &t, 1e-7).unwrap();
        if !r.pass || r.max_error >= 1e-7 {
            return Err(format!("alpha {alpha}: max error {}", r.max_error));
        }
        worst = worst.max(r.max_error);
    }
    Ok(format!("50 alphas, worst max_i <psi_i|E_not_i|psi_i> = {worst:.1e}"))
}

fn toy_bit() -> Suite {
    let (model, scenario) = spekkens_toy_bit();
    let audit = audit_model(&model, &scenario).map_err(|e| e.to_string())?;
    let c = classify_superposition(&model, "+", &["0", "1"]).map_err(|e| e.to_string())?;
    if audit.max_deviation != 0.0 {
        return Err(format!("audit deviation {}", audit.max_deviation));
    }
    if c.verdict != Verdict::Epistemic || c.residual != 0.0 {
        return Err(format!("|+) classified {:?} with residual {}", c.verdict, c.residual));
    }
    Ok("deviation 0, |+) epistemic with residual 0".into())
}

fn thm1_contradiction() -> Suite {
    let mut parts = Vec::new();
    for alpha in [0.3, 0.5] {
        let sc = thm1_scenario(alpha, 4, 0.0).map_err(|e| e.to_string())?;
        let with = max_asymmetric_overlap_upper(&sc, "ket0", "psi", AsymmetricOptions { epistemic_constraint: true })
            .map_err(|e| e.to_string())?;
        if with.status != LpStatus::Infeasible {
            return Err(format!("alpha {alpha}: epistemic LP is {:?}", with.status));
        }
        let without =
            max_asymmetric_overlap_upper(&sc, "ket0", "psi", AsymmetricOptions::default()).map_err(|e| e.to_string())?;
        let v = without.value.ok_or_else(|| format!("alpha {alpha}: LP {:?}", without.status))?;
        let bound = thm1_bound(alpha).unwrap();
        if v > bound + 1e-6 || v >= alpha * alpha {
            return Err(format!("alpha {alpha}: upper bound {v} vs ceiling {bound}, alpha^2 {}", alpha * alpha));
        }
        parts.push(format!("alpha {alpha}: infeasible / {v:.6} <= {bound:.6}"));
    }
    Ok(parts.join("; "))
}

fn thm2_scaling() -> Suite {
    let rows = reproduce_thm2(0.1f64.sqrt(), &[4, 5, 6, 7, 8]).map_err(|e| e.to_string())?;
    for r in &rows {
        if !r.within_bound {
            return Err(format!("d {}: {} > {}", r.d, r.lp_upper, r.analytic));
        }
    }
    for w in rows.windows(2) {
        if w[1].lp_upper > w[0].lp_upper {
            return Err(format!("lp_upper increases from d {} to d {}", w[0].d, w[1].d));
        }
    }
    let col: Vec<String> = rows.iter().map(|r| format!("{:.6}", r.lp_upper)).collect();
    Ok(format!("lp_upper d=4..8: {}", col.join(", ")))
}

fn thm3_table() -> Suite {
    let improves = |d| -> Result<Vec<bool>, String> {
        Ok(improvement_region(d, 1e-9).map_err(|e| e.to_string())?.iter().map(|r| r.improves).collect())
    };
    let (d4, d5, d6) = (improves(4)?, improves(5)?, improves(6)?);
    let count = |v: &[bool]| v.iter().filter(|&&b| b).count();
    if count(&d4) != 0 || count(&d5) == 0 || count(&d5) == d5.len() || count(&d6) != d6.len() {
        return Err(format!("improving rows: d4 {}, d5 {}, d6 {}", count(&d4), count(&d5), count(&d6)));
    }
    Ok(format!("improving rows of 99: d4 0, d5 {}, d6 99", count(&d5)))
}

fn property_suites() -> Suite {
    let suites: [(&str, fn(&mut rand_chacha::ChaCha8Rng) -> Suite); 8] = [
        ("asymmetric <= Born", eq6_models),
        ("LP chain", lp_chain),
        ("Helstrom ceiling", helstrom_lp),
        ("Boole", boole),
        ("monotonicity", monotonicity),
        ("tripartite <= pairwise", tripartite_pairwise),
        ("tripartite <= 3 eps", tripartite_noise),
        ("Helstrom error", helstrom_error),
    ];
    for (name, suite) in suites {
        suite(&mut rng()).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} suites, seed {SEED}", suites.len()))
}

fn oracle_equivalence() -> Suite {
    oracle_suite(&mut rng(), 24)
}

fn main() {
    let criteria: [(&str, fn() -> Suite, Option<Duration>); 8] = [
        ("construction validity", construction_validity, Some(Duration::from_secs(1))),
        ("anti-distinguishing synthesis", antidist_synthesis, Some(Duration::from_secs(30))),
        ("toy-bit reproduction", toy_bit, Some(Duration::from_millis(100))),
        ("first overlap theorem contradiction", thm1_contradiction, Some(Duration::from_secs(10))),
        ("second overlap theorem scaling", thm2_scaling, Some(Duration::from_secs(300))),
        ("noisy bound tightness table", thm3_table, Some(Duration::from_secs(1))),
        ("property suites", property_suites, None),
        ("oracle equivalence", oracle_equivalence, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = run();
        let took = start.elapsed();
        if let (Ok(_), Some(limit)) = (&result, limit) {
            if took > *limit {
                result = Err(format!("took {took:?}, limit {limit:?}"));
            }
        }
        match result {
            Ok(detail) => println!("PASS {} {name} ({:.3} s): {detail}", i + 1, took.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} ({:.3} s): {detail}", i + 1, took.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
