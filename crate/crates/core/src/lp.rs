//! Dense two-phase simplex for small linear programs.
//!
//! Problems are stated as `maximize c.x` subject to sparse linear rows with
//! `<=`, `>=` or `=` senses and `x >= 0`. Phase one minimises the sum of
//! artificial variables; artificials left in the basis at zero are pivoted
//! out and their rows dropped when redundant. Entering variables follow
//! Dantzig's rule while pivots make progress and Bland's rule after a run of
//! degenerate pivots, which rules out cycling.

use serde::{Deserialize, Serialize};

use crate::config::tolerances;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    /// `(variable, coefficient)` pairs; repeated variables are summed.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub num_vars: usize,
    /// Objective coefficients, maximised.
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        Self { num_vars, objective: vec![0.0; num_vars], constraints: Vec::new() }
    }

    pub fn add_var(&mut self) -> usize {
        self.num_vars += 1;
        self.objective.push(0.0);
        self.num_vars - 1
    }

    pub fn add(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { coeffs, sense, rhs });
    }

    /// Largest violation of any row or sign constraint at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let v = match c.sense {
                Sense::Le => (lhs - c.rhs).max(0.0),
                Sense::Ge => (c.rhs - lhs).max(0.0),
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal value when `status` is optimal.
    pub value: f64,
    pub x: Vec<f64>,
    /// Most negative reduced cost at termination; no improving column exists
    /// when this is above `-1e-9`.
    pub min_reduced_cost: f64,
    /// Largest constraint violation of `x`.
    pub residual: f64,
    pub pivots: usize,
}

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;
const MAX_PIVOTS: usize = 1_000_000;

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows` constraint rows, each `cols + 1` wide with the right-hand side last.
    a: Vec<f64>,
    /// Reduced costs `z_j - c_j`, then the current objective value.
    z: Vec<f64>,
    basis: Vec<usize>,
    /// Columns allowed to enter.
    allowed: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn w(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.w() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.a[i * self.w() + self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.w();
        let p = self.a[r * w + c];
        {
            let row = &mut self.a[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[c] = 1.0;
        }
        let pivot_row: Vec<(usize, f64)> = self.a[r * w..(r + 1) * w]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, *v))
            .collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.a[i * w..(i + 1) * w];
            for &(j, v) in &pivot_row {
                row[j] -= f * v;
            }
            row[c] = 0.0;
        }
        let f = self.z[c];
        if f != 0.0 {
            for &(j, v) in &pivot_row {
                self.z[j] -= f * v;
            }
            self.z[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        if bland {
            (0..self.cols).find(|&j| self.allowed[j] && self.z[j] < -COST_TOL)
        } else {
            let mut best = None;
            let mut best_v = -COST_TOL;
            for j in 0..self.cols {
                if self.allowed[j] && self.z[j] < best_v {
                    best_v = self.z[j];
                    best = Some(j);
                }
            }
            best
        }
    }

    fn leaving(&self, c: usize, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if a > PIVOT_TOL {
                let ratio = self.rhs(i).max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[bi]
                            } else {
                                a > self.at(bi, c)
                            }
                        } else {
                            ratio < br
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
        }
        best.map(|(i, _)| i)
    }

    /// Runs simplex iterations; returns false on unboundedness.
    fn optimize(&mut self) -> Result<bool> {
        let mut degenerate = 0usize;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::NumericalFailure("simplex pivot limit reached".into()));
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let Some(c) = self.entering(bland) else { return Ok(true) };
            let Some(r) = self.leaving(c, bland) else { return Ok(false) };
            if self.rhs(r).abs() <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.w();
        self.a.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.rows -= 1;
    }
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    let n = problem.num_vars;
    if problem.objective.len() != n {
        return Err(Error::NumericalFailure("objective length differs from variable count".into()));
    }
    for c in &problem.constraints {
        if !c.rhs.is_finite() || c.coeffs.iter().any(|&(j, a)| j >= n || !a.is_finite()) {
            return Err(Error::NumericalFailure("malformed constraint".into()));
        }
    }
    if problem.objective.iter().any(|c| !c.is_finite()) {
        return Err(Error::NumericalFailure("non-finite objective".into()));
    }

    // normalise so every right-hand side is nonnegative
    let rows: Vec<(Vec<(usize, f64)>, Sense, f64)> = problem
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let sense = match c.sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
                (c.coeffs.iter().map(|&(j, a)| (j, -a)).collect(), sense, -c.rhs)
            } else {
                (c.coeffs.clone(), c.sense, c.rhs)
            }
        })
        .collect();
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let cols = n + n_slack + n_art;
    let art_start = n + n_slack;
    let w = cols + 1;

    let mut t = Tableau {
        rows: m,
        cols,
        a: vec![0.0; m * w],
        z: vec![0.0; w],
        basis: vec![0; m],
        allowed: vec![true; cols],
        pivots: 0,
    };
    let (mut s, mut a) = (n, art_start);
    for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        for &(j, v) in coeffs {
            t.a[i * w + j] += v;
        }
        t.a[i * w + cols] = *rhs;
        match sense {
            Sense::Le => {
                t.a[i * w + s] = 1.0;
                t.basis[i] = s;
                s += 1;
            }
            Sense::Ge => {
                t.a[i * w + s] = -1.0;
                s += 1;
                t.a[i * w + a] = 1.0;
                t.basis[i] = a;
                a += 1;
            }
            Sense::Eq => {
                t.a[i * w + a] = 1.0;
                t.basis[i] = a;
                a += 1;
            }
        }
    }

    let tol = tolerances();
    if n_art > 0 {
        // phase one: maximise -sum(artificials)
        for i in 0..m {
            if t.basis[i] >= art_start {
                for j in 0..w {
                    t.z[j] -= t.a[i * w + j];
                }
            }
        }
        for j in art_start..cols {
            t.z[j] = 0.0;
        }
        t.optimize()?;
        let infeasibility = -t.z[cols];
        if infeasibility > tol.lp_feasibility {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: f64::NAN,
                x: Vec::new(),
                min_reduced_cost: 0.0,
                residual: infeasibility,
                pivots: t.pivots,
            });
        }
        // drive remaining artificials out of the basis
        let mut i = 0;
        while i < t.rows {
            if t.basis[i] >= art_start {
                let col = (0..art_start)
                    .filter(|&j| t.at(i, j).abs() > PIVOT_TOL)
                    .max_by(|&x, &y| t.at(i, x).abs().total_cmp(&t.at(i, y).abs()));
                match col {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => t.remove_row(i),
                }
            } else {
                i += 1;
            }
        }
        for j in art_start..cols {
            t.allowed[j] = false;
        }
    }

    // phase two objective row
    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&problem.objective);
    t.z = vec![0.0; w];
    for j in 0..cols {
        t.z[j] = -cost[j];
    }
    for i in 0..t.rows {
        let cb = cost[t.basis[i]];
        if cb != 0.0 {
            for j in 0..w {
                t.z[j] += cb * t.a[i * w + j];
            }
        }
    }
    for &b in &t.basis {
        t.z[b] = 0.0;
    }
    let bounded = t.optimize()?;
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: f64::INFINITY,
            x: Vec::new(),
            min_reduced_cost: f64::NEG_INFINITY,
            residual: 0.0,
            pivots: t.pivots,
        });
    }

    let mut x = vec![0.0; n];
    for i in 0..t.rows {
        if t.basis[i] < n {
            x[t.basis[i]] = t.rhs(i).max(0.0);
        }
    }
    let residual = problem.max_violation(&x);
    if residual > tol.lp_residual {
        return Err(Error::NumericalFailure(format!("simplex solution violates constraints by {residual:e}")));
    }
    let min_reduced_cost = (0..cols).filter(|&j| t.allowed[j]).map(|j| t.z[j]).fold(0.0, f64::min);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value: problem.value_at(&x),
        x,
        min_reduced_cost,
        residual,
        pivots: t.pivots,
    })
}
