//! Dense matrices over the quaternions.
//!
//! Entries are stored row-major. Products keep the left-to-right order of
//! quaternion factors, and vectors are columns acted on from the left with
//! scalars on the right (`A v = v λ`).
//!
//! Floating-point rank, inverse and determinant go through the complex
//! embedding `Φ(A1 + A2 j) = [[A1, A2], [-conj A2, conj A1]]`; exact
//! matrices use Gauss-Jordan elimination directly over the division ring.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{parse_rational, rational_from_f64, Quaternion, Scalar};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ExactMatrix = HMatrix<BigRational>;

/// Relative rank cutoff per unit of matrix dimension.
pub const RANK_TOL_PER_DIM: f64 = 1e-9;

pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    RANK_TOL_PER_DIM * rows.max(cols) as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct HMatrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion<T>>,
}

impl<T: Scalar> HMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Quaternion<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Parse("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion<T>>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, found: bad.len() });
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Quaternion<T>>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|col| col.len() != r) {
            return Err(Error::DimensionMismatch { expected: r, found: bad.len() });
        }
        Self::new(r, c, (0..r * c).map(|idx| columns[idx % c][idx / c].clone()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Quaternion::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Quaternion::one() } else { Quaternion::zero() })
    }

    pub fn diagonal(entries: &[Quaternion<T>]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { Quaternion::zero() })
    }

    /// `J(λ, k)`: λ on the diagonal, 1 on the superdiagonal.
    pub fn jordan_block(lambda: Quaternion<T>, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| {
            if i == j {
                lambda.clone()
            } else if j == i + 1 {
                Quaternion::one()
            } else {
                Quaternion::zero()
            }
        })
    }

    /// `E_{i,j}` (0-based) of size n.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        Self::from_fn(n, n, |r, c| if (r, c) == (i, j) { Quaternion::one() } else { Quaternion::zero() })
    }

    pub fn direct_sum(blocks: &[Self]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NonSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn entries(&self) -> &[Quaternion<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Quaternion<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Quaternion<T>> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Quaternion::is_zero)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, k| {
            (0..self.cols).fold(Quaternion::zero(), |acc, j| {
                acc.add_ref(&self[(i, j)].mul_ref(&rhs[(j, k)]))
            })
        }))
    }

    pub fn mul_vec(&self, v: &[Quaternion<T>]) -> Result<Vec<Quaternion<T>>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Quaternion::zero(), |acc, (a, x)| acc.add_ref(&a.mul_ref(x)))
            })
            .collect())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, Quaternion::add_ref)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, Quaternion::sub_ref)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&Quaternion<T>, &Quaternion<T>) -> Quaternion<T>) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Multiplies every entry by a real scalar.
    pub fn scale(&self, s: &T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|q| q.scale(s)).collect(),
        }
    }

    /// Left-multiplies every entry by a quaternion scalar: `(q I) A`.
    pub fn left_scale(&self, q: &Quaternion<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| q.mul_ref(a)).collect(),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn to_f64(&self) -> HMatrix<f64> {
        HMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Quaternion::to_f64).collect(),
        }
    }

    /// Row-reduces a copy of `self` in place of an augmented block and
    /// returns the pivot columns. Zero tests are exact, so this is meant for
    /// exact scalar fields.
    fn eliminate(work: &mut [Vec<Quaternion<T>>], pivot_cols: usize) -> Vec<usize> {
        let rows = work.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !work[i][c].is_zero()) else {
                continue;
            };
            work.swap(r, p);
            let inv = work[r][c].inverse().expect("pivot is nonzero");
            for x in work[r].iter_mut() {
                *x = inv.mul_ref(x);
            }
            for i in 0..rows {
                if i != r && !work[i][c].is_zero() {
                    let f = work[i][c].clone();
                    let pivot_row = work[r].clone();
                    for (x, y) in work[i].iter_mut().zip(&pivot_row) {
                        *x = x.sub_ref(&f.mul_ref(y));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Rank with exact zero tests.
    pub fn rank_exact(&self) -> usize {
        let mut work: Vec<Vec<_>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        Self::eliminate(&mut work, self.cols).len()
    }

    /// Gauss-Jordan inverse with exact zero tests.
    pub fn inverse_exact(&self) -> Result<Self> {
        let n = self.ensure_square()?;
        let mut work: Vec<Vec<_>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| if i == j { Quaternion::one() } else { Quaternion::zero() }));
                row
            })
            .collect();
        if Self::eliminate(&mut work, n).len() < n {
            return Err(Error::Singular { det: 0.0 });
        }
        Ok(Self::from_fn(n, n, |i, j| work[i][n + j].clone()))
    }
}

impl<T> std::ops::Index<(usize, usize)> for HMatrix<T> {
    type Output = Quaternion<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for HMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// `ψ(v1 + v2 j) = [v1; -conj(v2)]`, the column form compatible with Φ:
/// `Φ(A) ψ(v) = ψ(A v)` and `ψ(v z) = ψ(v) z` for complex `z`.
pub fn embed_vector(v: &[Quaternion<f64>]) -> DVector<Complex64> {
    let n = v.len();
    DVector::from_fn(2 * n, |r, _| {
        let (z1, z2) = v[r % n].split();
        if r < n {
            z1
        } else {
            -z2.conj()
        }
    })
}

/// Inverse of [`embed_vector`].
pub fn pullback_vector(x: &[Complex64]) -> Vec<Quaternion<f64>> {
    let n = x.len() / 2;
    (0..n)
        .map(|i| Quaternion::from_split(x[i], -x[n + i].conj()))
        .collect()
}

/// Image of right multiplication by `j` in embedded coordinates.
pub fn embedded_times_j(x: &[Complex64]) -> DVector<Complex64> {
    let n = x.len() / 2;
    DVector::from_fn(2 * n, |r, _| {
        if r < n {
            x[n + r].conj()
        } else {
            -x[r - n].conj()
        }
    })
}

impl HMatrix<f64> {
    /// The complex embedding Φ.
    pub fn embed_phi(&self) -> Result<ComplexMatrix> {
        self.ensure_square()?;
        Ok(self.embed_rect())
    }

    /// Φ extended to rectangular matrices (same block layout).
    pub fn embed_rect(&self) -> ComplexMatrix {
        let (r, c) = (self.rows, self.cols);
        let mut m = ComplexMatrix::zeros(2 * r, 2 * c);
        for i in 0..r {
            for j in 0..c {
                let (a1, a2) = self[(i, j)].split();
                m[(i, j)] = a1;
                m[(i, c + j)] = a2;
                m[(r + i, j)] = -a2.conj();
                m[(r + i, c + j)] = a1.conj();
            }
        }
        m
    }

    /// Reads a quaternion matrix back from the top block row of a
    /// Φ-structured complex matrix.
    pub fn from_phi(m: &ComplexMatrix) -> Result<Self> {
        if !m.nrows().is_multiple_of(2) || !m.ncols().is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: 2 * (m.nrows() / 2), found: m.nrows() });
        }
        let (r, c) = (m.nrows() / 2, m.ncols() / 2);
        Ok(Self::from_fn(r, c, |i, j| Quaternion::from_split(m[(i, j)], m[(i, c + j)])))
    }

    /// Study determinant `det Φ(A)`, a nonnegative real.
    pub fn det_h(&self) -> Result<f64> {
        Ok(self.embed_phi()?.determinant().re)
    }

    /// Singular values of Φ(A), descending. Each appears twice.
    pub fn phi_singular_values(&self) -> Vec<f64> {
        crate::cplx::svd(&self.embed_rect()).values
    }

    /// Number of singular values of Φ(A) above `tol · σ_max`, halved.
    pub fn rank(&self, tol: f64) -> usize {
        let s = self.phi_singular_values();
        let Some(&smax) = s.first() else { return 0 };
        if smax == 0.0 {
            return 0;
        }
        let count = s.iter().filter(|&&x| x > tol * smax).count();
        count.div_ceil(2)
    }

    pub fn rank_default(&self) -> usize {
        self.rank(default_rank_tol(self.rows, self.cols))
    }

    /// Inverse through Φ. Fails with `Singular` when the rank at the
    /// default tolerance is deficient.
    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with_tol(default_rank_tol(self.rows, self.cols))
    }

    pub fn inverse_with_tol(&self, tol: f64) -> Result<Self> {
        let n = self.ensure_square()?;
        let phi = self.embed_phi()?;
        if self.rank(tol) < n {
            return Err(Error::Singular { det: phi.determinant().re });
        }
        if self.is_upper_triangular() {
            return self.upper_triangular_inverse();
        }
        let inv = phi.clone().try_inverse().ok_or(Error::Singular { det: phi.determinant().re })?;
        Self::from_phi(&inv)
    }

    fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].is_zero()))
    }

    /// Back substitution. Keeps the exact zeros below the diagonal, which
    /// the general route through Φ replaces by rounding noise; high powers
    /// of a Jordan matrix amplify that noise.
    fn upper_triangular_inverse(&self) -> Result<Self> {
        let n = self.rows;
        let diag_inv = (0..n).map(|i| self[(i, i)].inverse()).collect::<Result<Vec<_>>>()?;
        let mut x = Self::zeros(n, n);
        for j in 0..n {
            for i in (0..=j).rev() {
                let mut acc = if i == j { Quaternion::one() } else { Quaternion::zero() };
                for k in i + 1..=j {
                    acc = acc - self[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = diag_inv[i] * acc;
            }
        }
        Ok(x)
    }

    /// Largest entry modulus and its 0-based position; ties go to the
    /// lexicographically smallest position.
    pub fn max_entry_norm(&self) -> Result<(f64, (usize, usize))> {
        let mut best: Option<(f64, usize)> = None;
        for (idx, q) in self.data.iter().enumerate() {
            let n = q.norm();
            if best.is_none_or(|(b, _)| n > b) {
                best = Some((n, idx));
            }
        }
        match best {
            Some((n, idx)) if n > 0.0 => Ok((n, (idx / self.cols, idx % self.cols))),
            _ => Err(Error::ZeroMatrix),
        }
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.sub_ref(b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, rhs: &Self, eps: f64) -> bool {
        (self.rows, self.cols) == (rhs.rows, rhs.cols) && self.max_abs_diff(rhs) <= eps
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(Quaternion::norm).fold(0.0, f64::max)
    }

    /// Spectral condition number of Φ(A).
    pub fn condition_number(&self) -> f64 {
        let s = self.phi_singular_values();
        match (s.first(), s.last()) {
            (Some(&a), Some(&b)) if b > 0.0 => a / b,
            _ => f64::INFINITY,
        }
    }

    pub fn to_exact(&self) -> Result<ExactMatrix> {
        let data = self
            .data
            .iter()
            .map(|q| {
                Ok(Quaternion::new(
                    rational_from_f64(q.a0)?,
                    rational_from_f64(q.a1)?,
                    rational_from_f64(q.a2)?,
                    rational_from_f64(q.a3)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        HMatrix::new(self.rows, self.cols, data)
    }
}

/// One quaternion component in input JSON: a number, or a string holding
/// an exact rational such as `"1/3"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Component {
    Number(f64),
    Text(String),
}

impl Component {
    fn exact(&self) -> Result<BigRational> {
        match self {
            Component::Number(x) => rational_from_f64(*x),
            Component::Text(s) => parse_rational(s),
        }
    }

    fn float(&self) -> Result<f64> {
        match self {
            Component::Number(x) => Ok(*x),
            Component::Text(s) => Ok(Scalar::to_f64(&parse_rational(s)?)),
        }
    }
}

/// `{"n": int, "entries": [[[a0,a1,a2,a3], ...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub n: usize,
    pub entries: Vec<Vec<[Component; 4]>>,
}

impl MatrixDoc {
    fn check_shape(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parse("\"n\" must be positive".into()));
        }
        if self.entries.len() != self.n || self.entries.iter().any(|r| r.len() != self.n) {
            return Err(Error::Parse(format!("entries must form an {0}x{0} grid", self.n)));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> Result<HMatrix<f64>> {
        self.check_shape()?;
        let rows = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|[a, b, c, d]| Ok(Quaternion::new(a.float()?, b.float()?, c.float()?, d.float()?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.iter().flatten().any(|q| ![q.a0, q.a1, q.a2, q.a3].iter().all(|x| x.is_finite())) {
            return Err(Error::Parse("non-finite matrix entry".into()));
        }
        HMatrix::from_rows(rows)
    }

    pub fn to_exact(&self) -> Result<ExactMatrix> {
        self.check_shape()?;
        let rows = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|[a, b, c, d]| Ok(Quaternion::new(a.exact()?, b.exact()?, c.exact()?, d.exact()?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        HMatrix::from_rows(rows)
    }

    pub fn from_matrix(m: &HMatrix<f64>) -> Self {
        let entries = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|q| {
                        let q = q.clean_zero();
                        [q.a0, q.a1, q.a2, q.a3].map(Component::Number)
                    })
                    .collect()
            })
            .collect();
        Self { n: m.rows(), entries }
    }
}

impl Serialize for HMatrix<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixDoc::from_matrix(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HMatrix<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MatrixDoc::deserialize(d)?.to_matrix().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Quaternion<f64>;
    type M = HMatrix<f64>;

    fn real_diag(d: &[f64]) -> M {
        M::diagonal(&d.iter().map(|&x| Q::real(x)).collect::<Vec<_>>())
    }

    #[test]
    fn phi_of_j_and_identity() {
        let phi = M::diagonal(&[Q::j()]).embed_phi().unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(phi, ComplexMatrix::from_row_slice(2, 2, &[Complex64::default(), one, -one, Complex64::default()]));
        assert_eq!(M::identity(3).embed_phi().unwrap(), ComplexMatrix::identity(6, 6));
    }

    #[test]
    fn phi_is_multiplicative_on_units() {
        let (i, j, k) = (M::diagonal(&[Q::i()]), M::diagonal(&[Q::j()]), M::diagonal(&[Q::k()]));
        let lhs = i.matmul(&j).unwrap().embed_phi().unwrap();
        let rhs = i.embed_phi().unwrap() * j.embed_phi().unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, k.embed_phi().unwrap());
    }

    #[test]
    fn non_square_rejected() {
        let a = M::zeros(2, 3);
        assert_eq!(a.embed_phi(), Err(Error::NonSquare { rows: 2, cols: 3 }));
        assert!(a.det_h().is_err());
        assert!(a.matmul(&M::zeros(2, 2)).is_err());
    }

    #[test]
    fn study_determinants() {
        assert!((M::diagonal(&[Q::j()]).det_h().unwrap() - 1.0).abs() < 1e-15);
        assert!((M::identity(4).det_h().unwrap() - 1.0).abs() < 1e-15);
        assert!((real_diag(&[2.0, 0.5]).det_h().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn products_keep_order() {
        let i = M::diagonal(&[Q::i()]);
        let j = M::diagonal(&[Q::j()]);
        assert_eq!(i.matmul(&j).unwrap(), M::diagonal(&[Q::k()]));
        assert_eq!(j.matmul(&i).unwrap(), M::diagonal(&[-Q::k()]));
    }

    #[test]
    fn inverses() {
        let j3 = M::jordan_block(Q::one(), 3);
        let inv = j3.inverse().unwrap();
        assert!(j3.matmul(&inv).unwrap().approx_eq(&M::identity(3), 1e-14));
        assert!(real_diag(&[2.0, 0.5]).inverse().unwrap().approx_eq(&real_diag(&[0.5, 2.0]), 1e-15));
        let j2inv = M::jordan_block(Q::one(), 2).inverse().unwrap();
        let expected = M::from_rows(vec![vec![Q::one(), -Q::one()], vec![Q::zero(), Q::one()]]).unwrap();
        assert!(j2inv.approx_eq(&expected, 1e-15));
        assert!(M::diagonal(&[Q::j()]).inverse().unwrap().approx_eq(&M::diagonal(&[-Q::j()]), 1e-15));
        assert!(matches!(M::unit(3, 0, 2).inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn ranks() {
        assert_eq!(M::unit(3, 0, 2).rank_default(), 1);
        assert_eq!(M::zeros(3, 3).rank_default(), 0);
        assert_eq!(M::jordan_block(Q::zero(), 3).rank_default(), 2);
        assert_eq!(M::identity(5).rank_default(), 5);
        // right-dependent columns: second column = first column times j
        let v = vec![Q::one(), Q::i()];
        let w: Vec<Q> = v.iter().map(|x| *x * Q::j()).collect();
        assert_eq!(M::from_columns(&[v, w]).unwrap().rank_default(), 1);
    }

    #[test]
    fn exact_elimination() {
        let j3 = M::jordan_block(Q::one(), 3).to_exact().unwrap();
        let inv = j3.inverse_exact().unwrap();
        assert_eq!(j3.matmul(&inv).unwrap(), ExactMatrix::identity(3));
        assert_eq!(M::jordan_block(Q::zero(), 3).to_exact().unwrap().rank_exact(), 2);
        assert!(M::unit(2, 0, 1).to_exact().unwrap().inverse_exact().is_err());
        let q = Q::new(1.0, 2.0, -1.0, 0.5);
        let a = M::from_rows(vec![vec![q, Q::j()], vec![Q::k(), Q::real(3.0)]]).unwrap().to_exact().unwrap();
        let inv = a.inverse_exact().unwrap();
        assert_eq!(inv.matmul(&a).unwrap(), ExactMatrix::identity(2));
    }

    #[test]
    fn max_entry() {
        let j3 = M::jordan_block(Q::one(), 3);
        let sq = j3.matmul(&j3).unwrap();
        assert_eq!(sq.max_entry_norm().unwrap(), (2.0, (0, 1)));
        assert_eq!(M::identity(3).max_entry_norm().unwrap(), (1.0, (0, 0)));
        assert_eq!(M::unit(4, 0, 3).scale(&5.0).max_entry_norm().unwrap(), (5.0, (0, 3)));
        assert_eq!(M::zeros(2, 2).max_entry_norm(), Err(Error::ZeroMatrix));
    }

    #[test]
    fn vector_embedding_intertwines() {
        let a = M::from_rows(vec![
            vec![Q::new(1.0, 2.0, 3.0, 4.0), Q::new(0.0, -1.0, 0.5, 2.0)],
            vec![Q::new(-2.0, 0.0, 1.0, 1.0), Q::new(0.3, 0.3, -0.7, 0.1)],
        ])
        .unwrap();
        let v = vec![Q::new(0.5, -1.0, 2.0, 0.25), Q::new(1.0, 1.0, -1.0, 3.0)];
        let lhs = a.embed_phi().unwrap() * embed_vector(&v);
        let rhs = embed_vector(&a.mul_vec(&v).unwrap());
        assert!((lhs - rhs).norm() < 1e-13);
        let vj: Vec<Q> = v.iter().map(|x| *x * Q::j()).collect();
        assert!((embedded_times_j(embed_vector(&v).as_slice()) - embed_vector(&vj)).norm() < 1e-15);
        let back = pullback_vector(embed_vector(&v).as_slice());
        assert!(back.iter().zip(&v).all(|(a, b)| a.approx_eq(b, 1e-15)));
    }

    #[test]
    fn json_schema() {
        let doc = r#"{"n": 2, "entries": [[[1,0,0,0],["1/2",0,0,0]],[[0,0,0,0],[1,0,0,0]]]}"#;
        let m: M = serde_json::from_str(doc).unwrap();
        assert_eq!(m[(0, 1)], Q::real(0.5));
        let back = serde_json::to_string(&m).unwrap();
        assert_eq!(back, r#"{"n":2,"entries":[[[1.0,0.0,0.0,0.0],[0.5,0.0,0.0,0.0]],[[0.0,0.0,0.0,0.0],[1.0,0.0,0.0,0.0]]]}"#);
        assert!(serde_json::from_str::<M>(r#"{"n": 2, "entries": [[[1,0,0,0]]]}"#).is_err());
        let exact: MatrixDoc = serde_json::from_str(doc).unwrap();
        assert_eq!(exact.to_exact().unwrap()[(0, 1)].a0, parse_rational("1/2").unwrap());
    }
}
