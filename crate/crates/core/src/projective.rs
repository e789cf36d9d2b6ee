//! Points and subspaces of quaternionic projective space.
//!
//! `ℍ^{n+1}` is a right vector space, so `[x] = [x α]` for every nonzero
//! quaternion `α`. Rank and projection work goes through the complex
//! embedding `ψ`, where the ℍ-span of a vector `x` becomes the complex span
//! of `ψ(x)` and `ψ(x j)`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cplx::{self, CVec};
use crate::error::{Error, Result};
use crate::hmat::{embed_vector, embedded_times_j, pullback_vector, HMatrix};
use crate::quat::{ExactQuaternion, Quaternion};

pub type HVector = Vec<Quaternion<f64>>;

/// Default threshold under which two subspaces are considered equal.
pub const SUBSPACE_EQ_TOL: f64 = 1e-8;

/// Relative residual under which a vector counts as dependent.
pub const SPAN_TOL: f64 = 1e-9;

/// Quaternionic Hermitian product `Σ conj(x_i) y_i`.
pub fn inner(x: &[Quaternion<f64>], y: &[Quaternion<f64>]) -> Quaternion<f64> {
    x.iter()
        .zip(y)
        .fold(Quaternion::zero(), |acc, (a, b)| acc + a.conj() * *b)
}

pub fn vnorm(x: &[Quaternion<f64>]) -> f64 {
    x.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}

pub fn unit_vector(n1: usize, i: usize) -> HVector {
    (0..n1)
        .map(|r| if r == i { Quaternion::one() } else { Quaternion::zero() })
        .collect()
}

fn right_scale(x: &[Quaternion<f64>], a: Quaternion<f64>) -> HVector {
    x.iter().map(|q| *q * a).collect()
}

/// A point `[x]` of `ℙⁿ_ℍ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint {
    homogeneous: HVector,
}

impl ProjectivePoint {
    pub fn new(homogeneous: HVector) -> Result<Self> {
        if homogeneous.is_empty() || vnorm(&homogeneous) == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        Ok(Self { homogeneous })
    }

    pub fn basis_point(n1: usize, i: usize) -> Self {
        Self { homogeneous: unit_vector(n1, i) }
    }

    pub fn homogeneous(&self) -> &[Quaternion<f64>] {
        &self.homogeneous
    }

    pub fn len(&self) -> usize {
        self.homogeneous.len()
    }

    pub fn is_empty(&self) -> bool {
        self.homogeneous.is_empty()
    }

    /// Unit-length representative.
    pub fn normalized(&self) -> HVector {
        let n = vnorm(&self.homogeneous);
        self.homogeneous.iter().map(|q| q.scale(&(1.0 / n))).collect()
    }

    /// Image under a linear map; `None` when the point lies in its kernel.
    pub fn apply(&self, m: &HMatrix) -> Result<Option<Self>> {
        let v = m.mul_vec(&self.homogeneous)?;
        Ok(Self::new(v).ok())
    }
}

/// `sqrt(1 - |<x,y>|^2 / (|x|^2 |y|^2))`, evaluated as the residual of
/// projecting `ŷ` on the ℍ-line of `x̂` to keep small distances accurate.
pub fn point_dist(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    let x = p.normalized();
    let y = q.normalized();
    let c = inner(&x, &y);
    let r: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (*b - *a * c).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(r.min(1.0))
}

/// A projective subspace, stored as a canonical right-ℍ basis: reduced
/// column-echelon form, each vector scaled to unit length with its first
/// nonzero coordinate real and positive. The empty subspace has no basis
/// vectors and projective dimension -1.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveSubspace {
    n1: usize,
    basis: Vec<HVector>,
}

impl ProjectiveSubspace {
    pub fn empty(n1: usize) -> Self {
        Self { n1, basis: Vec::new() }
    }

    pub fn full(n1: usize) -> Self {
        Self::coordinate(n1, &(0..n1).collect::<Vec<_>>())
    }

    /// `L{e_i : i ∈ indices}` with 0-based indices.
    pub fn coordinate(n1: usize, indices: &[usize]) -> Self {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        Self {
            n1,
            basis: idx.into_iter().map(|i| unit_vector(n1, i)).collect(),
        }
    }

    /// Smallest subspace containing the given vectors.
    pub fn from_vectors(n1: usize, vectors: &[HVector]) -> Result<Self> {
        Self::from_vectors_tol(n1, vectors, SPAN_TOL)
    }

    pub fn from_vectors_tol(n1: usize, vectors: &[HVector], tol: f64) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != n1) {
            return Err(Error::DimensionMismatch { expected: n1, found: v.len() });
        }
        if vectors.is_empty() {
            return Ok(Self::empty(n1));
        }
        // Rank from the singular values of Φ of the stacked columns; the
        // basis from the leading left-singular vectors, whose span is
        // accurate even when individual singular values nearly coincide.
        let svd = cplx::svd(&HMatrix::from_columns(vectors)?.embed_rect());
        let smax = svd.values.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return Ok(Self::empty(n1));
        }
        let rank = svd.values.iter().filter(|&&s| s > tol * smax).count().div_ceil(2);
        let candidates: Vec<HVector> =
            (0..2 * rank).map(|i| pullback_vector(svd.u.column(i).as_slice())).collect();
        Ok(Self { n1, basis: canonical_basis(n1, pivoted_hbasis(&candidates, rank)) })
    }

    /// Subspace spanned by the complex vectors of a τ-invariant subspace of
    /// the embedded space.
    pub(crate) fn from_embedded(n1: usize, vectors: &[CVec]) -> Result<Self> {
        let hv: Vec<HVector> = vectors.iter().map(|x| pullback_vector(x.as_slice())).collect();
        Self::from_vectors(n1, &hv)
    }

    /// Length of the homogeneous vectors (`n + 1`).
    pub fn ambient_len(&self) -> usize {
        self.n1
    }

    pub fn basis(&self) -> &[HVector] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn proj_dim(&self) -> isize {
        self.basis.len() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_proper(&self) -> bool {
        self.basis.len() < self.n1
    }

    /// Orthonormal complex basis of `ψ(Ŵ)`, with `2 · rank` columns.
    pub(crate) fn embedded_basis(&self) -> Vec<CVec> {
        let mut cols = Vec::with_capacity(2 * self.basis.len());
        for v in &self.basis {
            let x = embed_vector(v);
            let xj = embedded_times_j(x.as_slice());
            cols.push(x);
            cols.push(xj);
        }
        cplx::orthonormalize(&cols, 1e-12)
    }

    /// Sine of the angle between `[p]` and this subspace.
    pub fn distance_to_point(&self, p: &ProjectivePoint) -> Result<f64> {
        if p.len() != self.n1 {
            return Err(Error::DimensionMismatch { expected: self.n1, found: p.len() });
        }
        if self.is_empty() {
            return Ok(1.0);
        }
        let x = embed_vector(&p.normalized());
        let m = cplx::columns_to_matrix(2 * self.n1, &[x]);
        Ok(cplx::residual_norm(&self.embedded_basis(), &m).min(1.0))
    }

    pub fn contains(&self, p: &ProjectivePoint, tol: f64) -> Result<bool> {
        Ok(self.distance_to_point(p)? < tol)
    }

    /// Image of the subspace under an invertible matrix.
    pub fn transform(&self, m: &HMatrix) -> Result<Self> {
        let images = self
            .basis
            .iter()
            .map(|v| m.mul_vec(v))
            .collect::<Result<Vec<_>>>()?;
        Self::from_vectors(m.rows(), &images)
    }

    /// Span of `self ∪ other`.
    pub fn join(&self, other: &Self) -> Result<Self> {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Self::from_vectors(self.n1, &all)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        subspace_dist(self, other).is_ok_and(|d| d < tol)
    }

    pub fn to_doc(&self) -> SubspaceDoc {
        SubspaceDoc {
            ambient: self.n1 - 1,
            basis: self
                .basis
                .iter()
                .map(|v| v.iter().map(Quaternion::clean_zero).collect())
                .collect(),
        }
    }
}

/// Span of a list of points.
pub fn span(points: &[ProjectivePoint]) -> Result<ProjectiveSubspace> {
    let first = points
        .first()
        .ok_or_else(|| Error::Parse("span of an empty point list".into()))?;
    let vectors: Vec<HVector> = points.iter().map(|p| p.homogeneous.clone()).collect();
    ProjectiveSubspace::from_vectors(first.len(), &vectors)
}

/// Sine of the largest principal angle between two subspaces of equal
/// dimension, measured in the embedded complex space.
pub fn subspace_dist(v: &ProjectiveSubspace, w: &ProjectiveSubspace) -> Result<f64> {
    if v.n1 != w.n1 {
        return Err(Error::DimensionMismatch { expected: v.n1, found: w.n1 });
    }
    if v.rank() != w.rank() {
        return Err(Error::DimensionMismatch { expected: v.rank(), found: w.rank() });
    }
    if v.is_empty() {
        return Ok(0.0);
    }
    let qv = v.embedded_basis();
    let qw = w.embedded_basis();
    let x = cplx::columns_to_matrix(2 * v.n1, &qv);
    Ok(cplx::residual_norm(&qw, &x).min(1.0))
}

/// Quaternionic modified Gram-Schmidt; drops vectors with relative
/// residual below `tol`.
pub fn orthonormal_hbasis(vectors: &[HVector], tol: f64) -> Vec<HVector> {
    let mut out: Vec<HVector> = Vec::new();
    for v in vectors {
        let n0 = vnorm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = inner(q, &r);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri = *ri - *qi * c;
                }
            }
        }
        let n = vnorm(&r);
        if n > tol * n0 {
            out.push(r.iter().map(|x| x.scale(&(1.0 / n))).collect());
        }
    }
    out
}

/// `rank` orthonormal vectors from `candidates`, taking at each step the
/// candidate with the largest residual against those already chosen.
fn pivoted_hbasis(candidates: &[HVector], rank: usize) -> Vec<HVector> {
    let mut out: Vec<HVector> = Vec::with_capacity(rank);
    while out.len() < rank {
        let best = candidates
            .iter()
            .map(|v| {
                let mut r = v.clone();
                for _ in 0..2 {
                    for q in &out {
                        let c = inner(q, &r);
                        for (ri, qi) in r.iter_mut().zip(q) {
                            *ri = *ri - *qi * c;
                        }
                    }
                }
                r
            })
            .max_by(|a, b| vnorm(a).total_cmp(&vnorm(b)));
        let Some(r) = best else { break };
        let n = vnorm(&r);
        if n == 0.0 {
            break;
        }
        out.push(r.iter().map(|x| x.scale(&(1.0 / n))).collect());
    }
    out
}

const PIVOT_TOL: f64 = 1e-6;
const SNAP_TOL: f64 = 1e-14;

/// Reduced column-echelon form of an orthonormal basis, then per-vector
/// unit scaling with the leading coordinate made real-positive.
fn canonical_basis(n1: usize, mut cols: Vec<HVector>) -> Vec<HVector> {
    let r = cols.len();
    let mut p = 0;
    for row in 0..n1 {
        if p == r {
            break;
        }
        let (best, mag) = (p..r)
            .map(|c| (c, cols[c][row].norm()))
            .fold((p, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= PIVOT_TOL {
            continue;
        }
        cols.swap(p, best);
        let inv = cols[p][row].inverse().expect("pivot is nonzero");
        cols[p] = right_scale(&cols[p], inv);
        cols[p][row] = Quaternion::one();
        for c in 0..r {
            if c != p {
                let f = cols[c][row];
                if f.norm() > 0.0 {
                    let pivot_col = cols[p].clone();
                    for (x, y) in cols[c].iter_mut().zip(&pivot_col) {
                        *x = *x - *y * f;
                    }
                    cols[c][row] = Quaternion::zero();
                }
            }
        }
        p += 1;
    }
    cols.sort_by_key(|v| v.iter().position(|q| q.norm() > SNAP_TOL).unwrap_or(n1));
    cols.into_iter()
        .map(|v| {
            let v: HVector = v
                .into_iter()
                .map(|q| {
                    let f = |x: f64| if x.abs() < SNAP_TOL { 0.0 } else { x };
                    Quaternion::new(f(q.a0), f(q.a1), f(q.a2), f(q.a3))
                })
                .collect();
            let lead = v.iter().find(|q| q.norm() > 1e-12).copied().unwrap_or(Quaternion::one());
            let phase = lead.conj().scale(&(1.0 / lead.norm()));
            let v = right_scale(&v, phase);
            let n = vnorm(&v);
            v.into_iter().map(|q| q.scale(&(1.0 / n)).clean_zero()).collect()
        })
        .collect()
}

/// `{"ambient": n, "basis": [vector, ...]}` where vectors have `n + 1`
/// quaternion entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceDoc {
    pub ambient: usize,
    pub basis: Vec<HVector>,
}

impl SubspaceDoc {
    pub fn to_subspace(&self) -> Result<ProjectiveSubspace> {
        ProjectiveSubspace::from_vectors(self.ambient + 1, &self.basis)
    }
}

impl Serialize for ProjectiveSubspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjectiveSubspace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = SubspaceDoc::deserialize(d)?;
        // Canonical bases are stored verbatim so that re-serialization is
        // byte-identical.
        if doc.basis.iter().any(|v| v.len() != doc.ambient + 1) {
            return Err(serde::de::Error::custom("basis vector length must be ambient + 1"));
        }
        Ok(Self { n1: doc.ambient + 1, basis: doc.basis })
    }
}

/// Exact-arithmetic subspace: a spanning set kept in reduced column-echelon
/// form over the rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSubspace {
    n1: usize,
    basis: Vec<Vec<ExactQuaternion>>,
}

impl ExactSubspace {
    pub fn coordinate(n1: usize, indices: &[usize]) -> Self {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let basis = idx
            .into_iter()
            .map(|i| {
                (0..n1)
                    .map(|r| if r == i { ExactQuaternion::one() } else { ExactQuaternion::zero() })
                    .collect()
            })
            .collect();
        Self { n1, basis }
    }

    pub fn from_vectors(n1: usize, vectors: &[Vec<ExactQuaternion>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != n1) {
            return Err(Error::DimensionMismatch { expected: n1, found: v.len() });
        }
        let mut kept: Vec<Vec<ExactQuaternion>> = Vec::new();
        for v in vectors {
            let mut trial = kept.clone();
            trial.push(v.clone());
            if HMatrix::from_columns(&trial)?.rank_exact() == trial.len() {
                kept = trial;
            }
        }
        Ok(Self { n1, basis: kept })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn proj_dim(&self) -> isize {
        self.basis.len() as isize - 1
    }

    pub fn basis(&self) -> &[Vec<ExactQuaternion>] {
        &self.basis
    }

    /// Exact equality: equal ranks and a joint span of the same rank.
    pub fn same_as(&self, other: &Self) -> bool {
        if self.n1 != other.n1 || self.rank() != other.rank() {
            return false;
        }
        if self.rank() == 0 {
            return true;
        }
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        HMatrix::<BigRational>::from_columns(&all).is_ok_and(|m| m.rank_exact() == self.rank())
    }

    pub fn transform(&self, m: &HMatrix<BigRational>) -> Result<Self> {
        let images = self.basis.iter().map(|v| m.mul_vec(v)).collect::<Result<Vec<_>>>()?;
        Self::from_vectors(m.rows(), &images)
    }

    pub fn to_f64(&self) -> Result<ProjectiveSubspace> {
        let v: Vec<HVector> = self
            .basis
            .iter()
            .map(|v| v.iter().map(Quaternion::to_f64).collect())
            .collect();
        ProjectiveSubspace::from_vectors(self.n1, &v)
    }
}
