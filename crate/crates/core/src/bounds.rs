//! Closed-form overlap bounds.
//!
//! Every evaluator returns the raw formula value, even where it exceeds the
//! trivial bounds; [`BoundResult`] carries the flags.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::helstrom_bound;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub formula_id: String,
    pub inputs: BoundInputs,
    pub value: f64,
    /// The formula value is above 1 and therefore vacuous as a probability bound.
    pub exceeds_one: bool,
    /// The formula value is above the matching trivial bound (`|<phi|psi>|^2`
    /// for asymmetric bounds, `1 - sqrt(1 - |<phi|psi>|^2)` for symmetric ones).
    pub exceeds_trivial: bool,
}

impl BoundResult {
    fn new(formula_id: &str, inputs: BoundInputs, value: f64, trivial: f64) -> Self {
        Self {
            formula_id: formula_id.to_string(),
            inputs,
            value,
            exceeds_one: value > 1.0,
            exceeds_trivial: value > trivial,
        }
    }
}

fn check_prob(x: f64, name: &'static str) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value: x })
    }
}

fn check_thm2_domain(alpha: f64, d: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha * alpha < 0.25) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    if d <= 3 {
        return Err(Error::DimensionTooSmall(d));
    }
    Ok(())
}

/// The Born-rule ceiling on the asymmetric overlap: `|<phi|psi>|^2` itself.
pub fn asym_trivial_bound(overlap_sq: f64) -> Result<f64> {
    check_prob(overlap_sq, "overlap_sq")?;
    Ok(overlap_sq)
}

/// `alpha^2 (1/2 + alpha^2)`.
pub fn thm1_bound(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_1_SQRT_2) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    let a2 = alpha * alpha;
    Ok(a2 * (0.5 + a2))
}

/// `alpha^2 (1 + 2 alpha) / (d - 2)`.
pub fn thm2_bound(alpha: f64, d: usize) -> Result<f64> {
    check_thm2_domain(alpha, d)?;
    Ok(alpha * alpha * (1.0 + 2.0 * alpha) / (d as f64 - 2.0))
}

/// `alpha^2 (1 + 2 alpha) / (d - 2) + (3d^2 - 7d) / (2 (d - 2)) * epsilon`.
pub fn thm3_bound(alpha: f64, d: usize, epsilon: f64) -> Result<f64> {
    check_thm2_domain(alpha, d)?;
    check_prob(epsilon, "epsilon")?;
    let df = d as f64;
    Ok(thm2_bound(alpha, d)? + (3.0 * df * df - 7.0 * df) / (2.0 * (df - 2.0)) * epsilon)
}

/// `1 - sqrt(1 - |<phi|psi>|^2)`, the Helstrom ceiling on the symmetric overlap.
pub fn symmetric_trivial_bound(overlap_sq: f64) -> Result<f64> {
    helstrom_bound(overlap_sq)
}

pub fn thm1_result(alpha: f64) -> Result<BoundResult> {
    let v = thm1_bound(alpha)?;
    let inputs = BoundInputs { alpha: Some(alpha), d: None, epsilon: None };
    Ok(BoundResult::new("thm1", inputs, v, alpha * alpha))
}

pub fn thm2_result(alpha: f64, d: usize) -> Result<BoundResult> {
    let v = thm2_bound(alpha, d)?;
    let inputs = BoundInputs { alpha: Some(alpha), d: Some(d), epsilon: None };
    Ok(BoundResult::new("thm2", inputs, v, alpha * alpha))
}

pub fn thm3_result(alpha: f64, d: usize, epsilon: f64) -> Result<BoundResult> {
    let v = thm3_bound(alpha, d, epsilon)?;
    let inputs = BoundInputs { alpha: Some(alpha), d: Some(d), epsilon: Some(epsilon) };
    Ok(BoundResult::new("thm3", inputs, v, symmetric_trivial_bound(alpha * alpha)?))
}

/// `k / 400` for `k = 1..=99`: 99 evenly spaced values of `alpha^2` in `(0, 1/4)`.
pub fn default_alpha_sq_grid() -> Vec<f64> {
    (1..=99).map(|k| k as f64 / 400.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub alpha_sq: f64,
    pub d: usize,
    pub epsilon: f64,
    pub eq6: f64,
    pub thm1: f64,
    pub thm2: f64,
    pub thm3: f64,
    pub eq16: f64,
    pub improves: bool,
}

impl BoundRow {
    pub const CSV_HEADER: &'static str = "alpha_sq,d,epsilon,eq6,thm1,thm2,thm3,eq16,improves";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.alpha_sq, self.d, self.epsilon, self.eq6, self.thm1, self.thm2, self.thm3, self.eq16, self.improves
        )
    }
}

pub fn bound_row(alpha_sq: f64, d: usize, epsilon: f64) -> Result<BoundRow> {
    let alpha = alpha_sq.sqrt();
    let thm3 = thm3_bound(alpha, d, epsilon)?;
    let eq16 = symmetric_trivial_bound(alpha_sq)?;
    Ok(BoundRow {
        alpha_sq,
        d,
        epsilon,
        eq6: asym_trivial_bound(alpha_sq)?,
        thm1: thm1_bound(alpha)?,
        thm2: thm2_bound(alpha, d)?,
        thm3,
        eq16,
        improves: thm3 < eq16,
    })
}

/// Compares the noise-tolerant symmetric bound with the Helstrom ceiling over
/// the default `alpha^2` grid.
pub fn improvement_region(d: usize, epsilon: f64) -> Result<Vec<BoundRow>> {
    improvement_region_on(d, epsilon, &default_alpha_sq_grid())
}

pub fn improvement_region_on(d: usize, epsilon: f64, alpha_sq: &[f64]) -> Result<Vec<BoundRow>> {
    if d <= 3 {
        return Err(Error::DimensionTooSmall(d));
    }
    alpha_sq.iter().map(|&a2| bound_row(a2, d, epsilon)).collect()
}

/// The table as CSV with a header line and LF line endings.
pub fn to_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from(BoundRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}
