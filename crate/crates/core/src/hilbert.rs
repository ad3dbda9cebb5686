//! Dense complex linear algebra on small Hilbert spaces.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::tolerances;
use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// `<a|b>`, conjugate-linear in `a`.
pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// A unit vector in `C^d`, `d >= 2`.
///
/// Amplitudes are stored as given; the global phase is not canonicalised.
/// Use [`StateVector::same_ray`] to compare states projectively.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::DimensionTooSmall(amplitudes.len()));
        }
        let n2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > tolerances().normalization {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized(n * n));
        }
        Self::new(amplitudes.into_iter().map(|a| a / n).collect())
    }

    /// The standard basis vector `e_k` of `C^dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: k + 1 });
        }
        let mut a = vec![ZERO; dim];
        a[k] = ONE;
        Self::new(a)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `|<self|other>|^2`.
    pub fn overlap_sq(&self, other: &StateVector) -> Result<f64> {
        Ok(inner_product(self, other)?.norm_sqr())
    }

    /// Projective equality: `|<self|other>|^2 = 1` within tolerance.
    pub fn same_ray(&self, other: &StateVector) -> bool {
        self.overlap_sq(other)
            .map(|o| (o - 1.0).abs() <= tolerances().state_equality)
            .unwrap_or(false)
    }

    /// `|self><self|`.
    pub fn projector(&self) -> Operator {
        Operator::outer(&self.amplitudes, &self.amplitudes)
    }

    pub(crate) fn scaled_phase(&self, phase: C64) -> StateVector {
        StateVector { amplitudes: self.amplitudes.iter().map(|a| a * phase).collect() }
    }
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(dot(&a.amplitudes, &b.amplitudes))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    dim: usize,
    amplitudes: Vec<C64>,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateDoc { dim: self.dim(), amplitudes: self.amplitudes.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = StateDoc::deserialize(d)?;
        if doc.dim != doc.amplitudes.len() {
            return Err(serde::de::Error::custom("dim does not match amplitude count"));
        }
        StateVector::new(doc.amplitudes).map_err(serde::de::Error::custom)
    }
}

/// A square complex matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            if row.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NumericalFailure("non-finite operator entry".into()));
            }
            entries.extend(row);
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, C64::new(v, 0.0));
        }
        m
    }

    /// `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        debug_assert_eq!(a.len(), b.len());
        let dim = a.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for x in a {
            for y in b {
                entries.push(x * y.conj());
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.entries.chunks(self.dim.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|H - H^dagger|_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(H + H^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, (self.get(i, j) + self.get(j, i).conj()) * 0.5);
            }
        }
        m
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok(self
            .entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `<s|A|s>`.
    pub fn expectation(&self, s: &StateVector) -> Result<C64> {
        let av = self.apply(s.amplitudes())?;
        Ok(dot(s.amplitudes(), &av))
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(m)
    }

    fn check_dim(&self, other: &Operator) {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.check_dim(rhs);
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.check_dim(rhs);
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs).expect("operator dimension mismatch")
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.dim.max(1)) {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorDoc {
    dim: usize,
    entries: Vec<Vec<C64>>,
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorDoc { dim: self.dim, entries: self.rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = OperatorDoc::deserialize(d)?;
        if doc.dim != doc.entries.len() {
            return Err(serde::de::Error::custom("dim does not match row count"));
        }
        Operator::from_rows(doc.entries).map_err(serde::de::Error::custom)
    }
}

/// An orthonormal basis of `C^d`, or an orthonormal family when built by the
/// caller from fewer vectors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Onb {
    vectors: Vec<StateVector>,
}

impl Onb {
    pub fn new(vectors: Vec<StateVector>) -> Result<Self> {
        check_orthonormal(&vectors)?;
        Ok(Self { vectors })
    }

    pub fn standard(dim: usize) -> Result<Self> {
        (0..dim).map(|k| StateVector::basis(dim, k)).collect::<Result<Vec<_>>>().map(|vectors| Self { vectors })
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Expresses `s` in this basis: entry `k` is `<b_k|s>`.
    pub fn coordinates(&self, s: &StateVector) -> Result<Vec<C64>> {
        self.vectors.iter().map(|b| inner_product(b, s)).collect()
    }
}

impl<'de> Deserialize<'de> for Onb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            vectors: Vec<StateVector>,
        }
        let doc = Doc::deserialize(d)?;
        Onb::new(doc.vectors).map_err(serde::de::Error::custom)
    }
}

fn check_orthonormal(vectors: &[StateVector]) -> Result<()> {
    let tol = tolerances().orthonormality;
    if let Some(first) = vectors.first() {
        let d = first.dim();
        if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
        }
        if vectors.len() > d {
            return Err(Error::NotOrthonormalInput);
        }
    }
    for (i, a) in vectors.iter().enumerate() {
        for b in &vectors[i + 1..] {
            if dot(a.amplitudes(), b.amplitudes()).norm() > tol {
                return Err(Error::NotOrthonormalInput);
            }
        }
    }
    Ok(())
}

/// Extends an orthonormal family to a basis of `C^dim` by Gram–Schmidt over
/// the standard basis. The input vectors come first, unchanged.
pub fn complete_onb(partial: &[StateVector], dim: usize) -> Result<Onb> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    if let Some(v) = partial.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: v.dim() });
    }
    check_orthonormal(partial)?;

    let mut out: Vec<StateVector> = partial.to_vec();
    for k in 0..dim {
        if out.len() == dim {
            break;
        }
        let mut v = vec![ZERO; dim];
        v[k] = ONE;
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for q in &out {
                let c = dot(q.amplitudes(), &v);
                for (x, qa) in v.iter_mut().zip(q.amplitudes()) {
                    *x -= c * qa;
                }
            }
        }
        let n = norm(&v);
        if n > 1e-6 {
            out.push(StateVector::normalized(v)?);
        }
    }
    if out.len() != dim {
        return Err(Error::NumericalFailure("basis completion lost rank".into()));
    }
    Ok(Onb { vectors: out })
}

/// Eigendecomposition of a Hermitian operator by cyclic complex Jacobi
/// rotations. Eigenvalues are returned in descending order with matching
/// eigenvectors.
pub fn hermitian_eig(h: &Operator) -> Result<(Vec<f64>, Onb)> {
    let tol = tolerances();
    let defect = h.hermiticity_defect();
    if defect > tol.hermiticity {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.dim();
    let (values, vecs) = jacobi(&h.hermitian_part(), tol.eig_off_diagonal, tol.eig_max_sweeps)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let col: Vec<C64> = (0..n).map(|i| vecs.get(i, k)).collect();
            StateVector::normalized(col)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sorted_values, Onb { vectors }))
}

fn off_diagonal_norm(a: &Operator) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Returns unsorted eigenvalues and the unitary whose columns are eigenvectors.
fn jacobi(h: &Operator, off_tol: f64, max_sweeps: usize) -> Result<(Vec<f64>, Operator)> {
    let n = h.dim();
    let mut a = h.clone();
    let mut v = Operator::identity(n);
    let threshold = off_tol * h.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off < threshold {
            break;
        }
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence { what: "Jacobi eigensolver", residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // R = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let r_pp = C64::new(c, 0.0);
                let r_pq = C64::new(s, 0.0);
                let r_qp = phase.conj() * -s;
                let r_qq = phase.conj() * c;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * r_pp + akq * r_qp);
                    a.set(k, q, akp * r_pq + akq * r_qq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, r_pp.conj() * apk + r_qp.conj() * aqk);
                    a.set(q, k, r_pq.conj() * apk + r_qq.conj() * aqk);
                }
                a.set(p, q, ZERO);
                a.set(q, p, ZERO);
                a.set(p, p, C64::new(a.get(p, p).re, 0.0));
                a.set(q, q, C64::new(a.get(q, q).re, 0.0));

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * r_pp + vkq * r_qp);
                    v.set(k, q, vkp * r_pq + vkq * r_qq);
                }
            }
        }
    }
    Ok(((0..n).map(|i| a.get(i, i).re).collect(), v))
}

/// `sum_k f(lambda_k) |v_k><v_k|`.
pub(crate) fn spectral_map(values: &[f64], vectors: &Onb, f: impl Fn(f64) -> f64) -> Operator {
    let n = vectors.vectors()[0].dim();
    let mut m = Operator::zeros(n);
    for (lam, v) in values.iter().zip(vectors.vectors()) {
        let w = f(*lam);
        if w == 0.0 {
            continue;
        }
        let a = v.amplitudes();
        for i in 0..n {
            let ai = a[i] * w;
            for j in 0..n {
                m.entries[i * n + j] += ai * a[j].conj();
            }
        }
    }
    m
}

/// Nearest positive semidefinite operator in Frobenius norm: negative
/// eigenvalues are clipped to zero.
pub fn psd_project(h: &Operator) -> Result<Operator> {
    let (values, vectors) = hermitian_eig(h)?;
    Ok(spectral_map(&values, &vectors, |l| l.max(0.0)))
}

/// A unitary `U` with `U psi = psi` and `U x = y`.
///
/// Such a unitary exists iff `<psi|x> = <psi|y>`. It acts as a two-dimensional
/// rotation carrying the normalised part of `x` orthogonal to `psi` onto that
/// of `y`, and as the identity on everything orthogonal to those vectors and
/// `psi`.
pub fn build_stabilizer_unitary(psi: &StateVector, x: &StateVector, y: &StateVector) -> Result<Operator> {
    let tol = tolerances();
    let d = psi.dim();
    for s in [x, y] {
        if s.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
        }
    }
    let a = inner_product(psi, x)?;
    let b = inner_product(psi, y)?;
    if (a - b).norm() > tol.stabilizer {
        return Err(Error::InnerProductMismatch((a - b).norm()));
    }
    let p = psi.amplitudes();
    let x_perp: Vec<C64> = x.amplitudes().iter().zip(p).map(|(xi, pi)| xi - a * pi).collect();
    let y_perp: Vec<C64> = y.amplitudes().iter().zip(p).map(|(yi, pi)| yi - b * pi).collect();
    let nx = norm(&x_perp);
    let ny = norm(&y_perp);

    let mut u = Operator::identity(d);
    if nx < tol.degenerate || ny < tol.degenerate {
        let diff: Vec<C64> = x.amplitudes().iter().zip(y.amplitudes()).map(|(s, t)| s - t).collect();
        if norm(&diff) > tol.stabilizer {
            return Err(Error::DegenerateInput);
        }
        return Ok(u);
    }
    let uu: Vec<C64> = x_perp.iter().map(|z| z / nx).collect();
    let vv: Vec<C64> = y_perp.iter().map(|z| z / ny).collect();
    let c = dot(&uu, &vv);
    let w_raw: Vec<C64> = vv.iter().zip(&uu).map(|(v, u)| v - c * u).collect();
    let s = norm(&w_raw);

    if s < tol.degenerate {
        // y_perp is a phase multiple of x_perp
        let phase = c / c.norm();
        let proj = Operator::outer(&uu, &uu);
        for i in 0..d {
            for j in 0..d {
                u.set(i, j, u.get(i, j) + (phase - ONE) * proj.get(i, j));
            }
        }
    } else {
        let w: Vec<C64> = w_raw.iter().map(|z| z / s).collect();
        // In the basis (uu, w) the block is [[c, -s], [s, conj(c)]].
        let block = [[c, C64::new(-s, 0.0)], [C64::new(s, 0.0), c.conj()]];
        let basis = [&uu, &w];
        for (bi, ei) in basis.iter().enumerate() {
            let proj = Operator::outer(ei, ei);
            for i in 0..d {
                for j in 0..d {
                    u.set(i, j, u.get(i, j) - proj.get(i, j));
                }
            }
            for (bj, ej) in basis.iter().enumerate() {
                let term = Operator::outer(ei, ej);
                for i in 0..d {
                    for j in 0..d {
                        u.set(i, j, u.get(i, j) + block[bi][bj] * term.get(i, j));
                    }
                }
            }
        }
    }

    let unitarity = (&(&u.adjoint() * &u) - &Operator::identity(d)).frobenius_norm();
    let fix = norm(&sub(&u.apply(p)?, p));
    let maps = norm(&sub(&u.apply(x.amplitudes())?, y.amplitudes()));
    let worst = unitarity.max(fix).max(maps);
    if worst > tol.stabilizer {
        return Err(Error::NumericalFailure(format!("stabilizer unitary residual {worst:e}")));
    }
    Ok(u)
}

fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
