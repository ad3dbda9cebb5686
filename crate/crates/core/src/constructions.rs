//! The state families behind the overlap theorems and the anti-distinguishability
//! criterion for triples of pure states.
//!
//! Both families live in a basis `{|0>, |1'>, ..., |(d-1)'>}`. The canonical
//! builders use the standard basis of `C^d`; [`Thm1Family::from_superposition`]
//! builds the basis around an arbitrary superposition instead.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{complete_onb, inner_product, norm, Onb, StateVector, C64};
use crate::povm::Povm;

/// Slack on the second inequality of the criterion when its inputs are
/// computed overlaps rather than exact numbers.
pub const CRITERION_SLACK: f64 = 1e-12;

/// Sufficient condition for the triple with pairwise squared overlaps
/// `a, b, c` to be anti-distinguishable: `a+b+c < 1` and
/// `(1-a-b-c)^2 >= 4abc`, evaluated exactly.
pub fn antidist_criterion(a: f64, b: f64, c: f64) -> Result<bool> {
    check_unit(a, "a")?;
    check_unit(b, "b")?;
    check_unit(c, "c")?;
    let s = a + b + c;
    Ok(s < 1.0 && (1.0 - s) * (1.0 - s) >= 4.0 * a * b * c)
}

/// [`antidist_criterion`] with the second inequality relaxed by `slack`.
///
/// The theorem families sit on the equality surface `(1-s)^2 = 4abc`, so
/// overlaps computed in floating point land on either side of it by a few ulps.
pub fn antidist_criterion_with_slack(a: f64, b: f64, c: f64, slack: f64) -> Result<bool> {
    check_unit(a, "a")?;
    check_unit(b, "b")?;
    check_unit(c, "c")?;
    let s = a + b + c;
    Ok(s < 1.0 && (1.0 - s) * (1.0 - s) - 4.0 * a * b * c >= -slack)
}

fn check_unit(x: f64, name: &'static str) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value: x })
    }
}

/// Pairwise squared overlaps `(|<s1|s0>|^2, |<s2|s0>|^2, |<s2|s1>|^2)`, clamped to `[0, 1]`.
pub fn triple_overlaps(s0: &StateVector, s1: &StateVector, s2: &StateVector) -> Result<(f64, f64, f64)> {
    let clamp = |x: f64| x.clamp(0.0, 1.0);
    Ok((
        clamp(s1.overlap_sq(s0)?),
        clamp(s2.overlap_sq(s0)?),
        clamp(s2.overlap_sq(s1)?),
    ))
}

/// Whether the criterion certifies `{s0, s1, s2}` as anti-distinguishable.
pub fn certify_triple(s0: &StateVector, s1: &StateVector, s2: &StateVector) -> Result<bool> {
    let (a, b, c) = triple_overlaps(s0, s1, s2)?;
    antidist_criterion_with_slack(a, b, c, CRITERION_SLACK)
}

/// Amplitudes shared by both families: `psi = alpha|0> + beta|1'> + gamma_c|2'>`
/// and `phi = delta|0> + eta|1'> + kappa|k'>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_c: f64,
    pub delta: f64,
    pub eta: f64,
    pub kappa: f64,
}

impl Coefficients {
    fn thm1(alpha: f64) -> Self {
        let a2 = alpha * alpha;
        let beta = SQRT_2 * a2;
        let delta = 1.0 - 2.0 * a2;
        let eta = SQRT_2 * alpha;
        Self {
            alpha,
            beta,
            gamma_c: (1.0 - a2 - beta * beta).max(0.0).sqrt(),
            delta,
            eta,
            kappa: (1.0 - delta * delta - eta * eta).max(0.0).sqrt(),
        }
    }

    fn thm2(alpha: f64) -> Self {
        let a2 = alpha * alpha;
        let beta = SQRT_2 * alpha.powf(1.5);
        let delta = 1.0 - 2.0 * a2;
        let eta = beta;
        Self {
            alpha,
            beta,
            gamma_c: (1.0 - a2 - beta * beta).max(0.0).sqrt(),
            delta,
            eta,
            kappa: (1.0 - delta * delta - eta * eta).max(0.0).sqrt(),
        }
    }
}

fn combine(basis: &Onb, terms: &[(usize, f64)]) -> Result<StateVector> {
    let d = basis.vectors()[0].dim();
    let mut v = vec![C64::new(0.0, 0.0); d];
    for &(k, w) in terms {
        for (x, b) in v.iter_mut().zip(basis.vectors()[k].amplitudes()) {
            *x += b * w;
        }
    }
    StateVector::normalized(v)
}

/// A superposition `psi` with `|<0|psi>|^2 = alpha^2` and a second state `phi`
/// with `|<phi|psi>|^2 = alpha^2` such that `{psi, phi, |0>}` is
/// anti-distinguishable.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Thm1Family {
    pub alpha: f64,
    pub dim: usize,
    pub psi: StateVector,
    pub phi: StateVector,
    pub ket0: StateVector,
    pub basis: Onb,
    pub coeffs: Coefficients,
}

/// Builds the canonical family in the standard basis of `C^d`.
pub fn build_thm1(alpha: f64, d: usize) -> Result<Thm1Family> {
    if !(alpha > 0.0 && alpha < FRAC_1_SQRT_2) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    if d < 4 {
        return Err(Error::DimensionTooSmall(d));
    }
    Thm1Family::in_basis(alpha, Onb::standard(d)?)
}

impl Thm1Family {
    fn in_basis(alpha: f64, basis: Onb) -> Result<Self> {
        let k = Coefficients::thm1(alpha);
        let psi = combine(&basis, &[(0, k.alpha), (1, k.beta), (2, k.gamma_c)])?;
        let phi = combine(&basis, &[(0, k.delta), (1, k.eta), (3, k.kappa)])?;
        let ket0 = basis.vectors()[0].clone();
        let dim = ket0.dim();
        Ok(Self { alpha, dim, psi, phi, ket0, basis, coeffs: k })
    }

    /// Builds the family around a given superposition `psi` of `basis`.
    ///
    /// Picks the first basis element `|0>` with `|<0|psi>|^2` in `(0, 1/2)`,
    /// removes the global phase so that `<0|psi>` is real and positive, then
    /// completes `|0>` to a basis `B'` in which `psi` takes the canonical
    /// form. Returns the index of the chosen element and the family; the
    /// family's `psi` equals the input up to global phase.
    pub fn from_superposition(psi: &StateVector, basis: &Onb) -> Result<(usize, Self)> {
        let d = psi.dim();
        if d < 4 {
            return Err(Error::DimensionTooSmall(d));
        }
        if basis.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: basis.len() });
        }
        let coords = basis.coordinates(psi)?;
        let (idx, amp) = coords
            .iter()
            .enumerate()
            .find(|(_, z)| {
                let p = z.norm_sqr();
                p > 1e-12 && p < 0.5 - 1e-12
            })
            .map(|(i, z)| (i, *z))
            .ok_or(Error::AlphaOutOfRange(f64::NAN))?;
        let alpha = amp.norm();
        if alpha >= FRAC_1_SQRT_2 {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        let k = Coefficients::thm1(alpha);
        let ket0 = basis.vectors()[idx].clone();
        let psi_r = psi.scaled_phase((amp / alpha).conj());

        // r = psi_r - alpha|0> spans the rest of psi; split it into |1'>, |2'>.
        let rest: Vec<C64> = psi_r
            .amplitudes()
            .iter()
            .zip(ket0.amplitudes())
            .map(|(p, z)| p - z * alpha)
            .collect();
        let r_norm = norm(&rest);
        let r_hat = StateVector::normalized(rest)?;
        let w = complete_onb(&[ket0.clone(), r_hat.clone()], d)?.vectors()[2].clone();
        let (c, s) = (k.beta / r_norm, k.gamma_c / r_norm);
        let mix = |a: f64, b: f64| -> Result<StateVector> {
            StateVector::normalized(
                r_hat.amplitudes().iter().zip(w.amplitudes()).map(|(x, y)| x * a + y * b).collect(),
            )
        };
        let one = mix(c, s)?;
        let two = mix(s, -c)?;
        let full = complete_onb(&[ket0, one, two], d)?;
        let fam = Self::in_basis(alpha, full)?;
        Ok((idx, fam))
    }

    /// `(|<phi|psi>|^2, |<0|psi>|^2, |<0|phi>|^2)`.
    pub fn criterion_inputs(&self) -> Result<(f64, f64, f64)> {
        triple_overlaps(&self.psi, &self.phi, &self.ket0)
    }

    /// The triple `[psi, phi, |0>]` in the order used for synthesis.
    pub fn triple(&self) -> [StateVector; 3] {
        [self.psi.clone(), self.phi.clone(), self.ket0.clone()]
    }

    pub fn basis_measurement(&self) -> Result<Povm> {
        Povm::from_onb(&self.basis, basis_labels(self.dim))
    }
}

fn basis_labels(d: usize) -> Vec<String> {
    (0..d).map(|k| if k == 0 { "0".to_string() } else { format!("{k}'") }).collect()
}

/// A state `psi` with `|<0|psi>|^2 = alpha^2 < 1/4` and `d - 3` states
/// `phi_i = delta|0> + eta|1'> + kappa|i'>`, `i = 3..d-1`, each with
/// `|<phi_i|psi>|^2 = alpha^2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Thm2Family {
    pub alpha: f64,
    pub dim: usize,
    pub psi: StateVector,
    pub ket0: StateVector,
    pub phis: Vec<StateVector>,
    pub basis: Onb,
    pub coeffs: Coefficients,
}

pub fn build_thm2(alpha: f64, d: usize) -> Result<Thm2Family> {
    if !(alpha > 0.0 && alpha * alpha < 0.25) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    if d < 4 {
        return Err(Error::DimensionTooSmall(d));
    }
    let basis = Onb::standard(d)?;
    let k = Coefficients::thm2(alpha);
    let psi = combine(&basis, &[(0, k.alpha), (1, k.beta), (2, k.gamma_c)])?;
    let phis = (3..d)
        .map(|i| combine(&basis, &[(0, k.delta), (1, k.eta), (i, k.kappa)]))
        .collect::<Result<Vec<_>>>()?;
    let ket0 = basis.vectors()[0].clone();
    Ok(Thm2Family { alpha, dim: d, psi, ket0, phis, basis, coeffs: k })
}

impl Thm2Family {
    /// Every triple the overlap argument needs: `{|0>, psi, phi_i}` for each
    /// `i`, then `{psi, phi_i, phi_j}` for each `i < j`. Entries index into
    /// [`Thm2Family::states`].
    pub fn required_triples(&self) -> Vec<[usize; 3]> {
        let n = self.phis.len();
        let mut out: Vec<[usize; 3]> = (0..n).map(|i| [1, 0, 2 + i]).collect();
        for i in 0..n {
            for j in i + 1..n {
                out.push([0, 2 + i, 2 + j]);
            }
        }
        out
    }

    /// `[psi, |0>, phi_3, ..., phi_{d-1}]`.
    pub fn states(&self) -> Vec<StateVector> {
        let mut v = vec![self.psi.clone(), self.ket0.clone()];
        v.extend(self.phis.iter().cloned());
        v
    }

    pub fn basis_measurement(&self) -> Result<Povm> {
        Povm::from_onb(&self.basis, basis_labels(self.dim))
    }
}

/// Born probabilities `<s|E_k|s>`, indexed `[state][measurement][outcome]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BornTable(pub Vec<Vec<Vec<f64>>>);

impl BornTable {
    pub fn get(&self, state: usize, measurement: usize, outcome: usize) -> f64 {
        self.0[state][measurement][outcome]
    }

    pub fn row(&self, state: usize, measurement: usize) -> &[f64] {
        &self.0[state][measurement]
    }
}

pub fn born_table(states: &[StateVector], measurements: &[Povm]) -> Result<BornTable> {
    let tol = crate::config::tolerances();
    let mut table = Vec::with_capacity(states.len());
    for s in states {
        let mut per_state = Vec::with_capacity(measurements.len());
        for m in measurements {
            if m.dim() != s.dim() {
                return Err(Error::DimensionMismatch { expected: m.dim(), found: s.dim() });
            }
            let mut row = Vec::with_capacity(m.len());
            for e in m.elements() {
                let z = e.expectation(s)?;
                if z.im.abs() > 1e-10 {
                    return Err(Error::NumericalFailure(format!("Born value has imaginary part {:e}", z.im)));
                }
                row.push(z.re.clamp(0.0, 1.0));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tol.born_row {
                return Err(Error::InvalidPovm(format!("Born row sums to {sum}")));
            }
            per_state.push(row);
        }
        table.push(per_state);
    }
    Ok(BornTable(table))
}

/// `<a|b>` for every ordered pair, as squared magnitudes.
pub fn overlap_matrix(states: &[StateVector]) -> Result<Vec<Vec<f64>>> {
    states
        .iter()
        .map(|a| states.iter().map(|b| Ok(inner_product(a, b)?.norm_sqr())).collect())
        .collect()
}
