//! Right-eigenvalue classes and the quaternionic Jordan decomposition.
//!
//! All numerical work happens on the complex embedding `Φ(A)`. Its spectrum
//! is closed under conjugation, so folding every eigenvalue into the closed
//! upper half plane yields each quaternionic class exactly twice.

use std::cmp::Ordering;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cplx::{self, CMat, CVec};
use crate::error::{Error, Result};
use crate::hmat::{embedded_times_j, pullback_vector, ExactMatrix, HMatrix};
use crate::projective::HVector;
use crate::quat::{ExactQuaternion, Quaternion};

/// Default relative tolerance for spectral rank decisions.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Backward-error allowance (in units of machine epsilon) used to size the
/// merge radius of eigenvalue clusters.
const CLUSTER_SLACK: f64 = 1e5;

/// Singular values within this factor above the null threshold make a rank
/// decision ambiguous.
const AMBIGUOUS_BAND: f64 = 1e3;

/// Relative residual allowed in `S A S⁻¹ = ⊕ J`.
const RECONSTRUCTION_TOL: f64 = 1e-6;

/// A similarity class of right eigenvalues, named by its complex
/// representative with nonnegative imaginary part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenClass {
    pub rep: Complex64,
    pub multiplicity: usize,
}

impl EigenClass {
    pub fn is_real(&self) -> bool {
        self.rep.im == 0.0
    }
}

impl Serialize for EigenClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc {
            re: f64,
            im: f64,
            multiplicity: usize,
        }
        Doc { re: self.rep.re, im: self.rep.im, multiplicity: self.multiplicity }.serialize(s)
    }
}

/// One Jordan block `J(rep, size)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanBlock {
    pub re: f64,
    pub im: f64,
    pub size: usize,
}

impl JordanBlock {
    pub fn new(rep: Complex64, size: usize) -> Self {
        Self { re: rep.re, im: rep.im, size }
    }

    pub fn rep(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        self.rep().norm()
    }
}

/// Block list plus a change of basis `S` with `S A S⁻¹ = ⊕ J(rep, size)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanData {
    pub blocks: Vec<JordanBlock>,
    #[serde(rename = "S")]
    pub s: HMatrix,
}

impl JordanData {
    /// Data for a matrix that already is `⊕ J(rep, size)`.
    pub fn from_blocks(blocks: Vec<JordanBlock>) -> Self {
        let n1 = blocks.iter().map(|b| b.size).sum();
        Self { blocks, s: HMatrix::identity(n1) }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// 0-based index of the first basis vector of each block.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let start = *acc;
                *acc += b.size;
                Some(start)
            })
            .collect()
    }

    pub fn jordan_matrix(&self) -> HMatrix {
        let parts: Vec<HMatrix> = self
            .blocks
            .iter()
            .map(|b| HMatrix::jordan_block(Quaternion::from_complex(b.rep()), b.size))
            .collect();
        HMatrix::direct_sum(&parts)
    }

    pub fn s_inverse(&self) -> Result<HMatrix> {
        self.s.inverse()
    }

    /// `max |S A S⁻¹ - ⊕J|` over entries.
    pub fn residual(&self, a: &HMatrix) -> Result<f64> {
        let conj = self.s.matmul(a)?.matmul(&self.s_inverse()?)?;
        Ok(conj.max_abs_diff(&self.jordan_matrix()))
    }

    pub fn is_semisimple(&self) -> bool {
        self.blocks.iter().all(|b| b.size == 1)
    }

    /// Eigenvalue classes with multiplicities, merged from the blocks.
    pub fn classes(&self) -> Vec<EigenClass> {
        let mut out: Vec<EigenClass> = Vec::new();
        for b in &self.blocks {
            match out.iter_mut().find(|c| c.rep == b.rep()) {
                Some(c) => c.multiplicity += b.size,
                None => out.push(EigenClass { rep: b.rep(), multiplicity: b.size }),
            }
        }
        sort_classes(&mut out);
        out
    }
}

fn sort_classes(v: &mut [EigenClass]) {
    v.sort_by(|a, b| {
        a.rep
            .norm()
            .total_cmp(&b.rep.norm())
            .then(a.rep.im.total_cmp(&b.rep.im))
            .then(a.rep.re.total_cmp(&b.rep.re))
    });
}

/// One resolved eigenvalue class: representative, Jordan chains in the
/// embedded space (top vectors), and the nilpotent shift used to build them.
struct ClassAnalysis {
    rep: Complex64,
    sizes: Vec<usize>,
    chains: Vec<(usize, CVec)>,
    shift: CMat,
}

struct Spectrum {
    classes: Vec<ClassAnalysis>,
}

fn embedded(a: &HMatrix) -> Result<(CMat, f64)> {
    let phi = a.embed_phi()?;
    let norm = cplx::svd(&phi).values.first().copied().unwrap_or(0.0);
    Ok((phi, norm))
}

fn folded_eigenvalues(phi: &CMat) -> Result<Vec<Complex64>> {
    let values = cplx::eigenvalues(phi).ok_or_else(|| Error::IllConditioned {
        context: "eigenvalue iteration did not converge".into(),
        gap: f64::NAN,
    })?;
    Ok(values.into_iter().map(|z| Complex64::new(z.re, z.im.abs())).collect())
}

/// Merge radius for a cluster of `count` folded eigenvalues. A Jordan block
/// of size `k` spreads its eigenvalues by roughly `ε^{1/k}`, and a folded
/// cluster of a class with blocks up to `k` has at least `2k` members.
fn cluster_radius(count: usize, tol: f64, scale: f64) -> f64 {
    let spread = (CLUSTER_SLACK * f64::EPSILON).powf(2.0 / count.max(2) as f64);
    tol.max(spread) * scale
}

fn analyze(a: &HMatrix, tol: f64) -> Result<Spectrum> {
    let (phi, norm) = embedded(a)?;
    let points = folded_eigenvalues(&phi)?;
    let mut classes = Vec::new();
    resolve(&phi, norm, points, tol, &mut classes)?;
    Ok(Spectrum { classes })
}

/// Divisive clustering: accept a group when it is tight and its generalized
/// eigenspace has the right dimension, otherwise cut its largest
/// single-linkage gap and recurse.
fn resolve(
    phi: &CMat,
    norm: f64,
    points: Vec<Complex64>,
    tol: f64,
    out: &mut Vec<ClassAnalysis>,
) -> Result<()> {
    let c = points.len();
    let centroid = points.iter().sum::<Complex64>() / c as f64;
    let radius = cluster_radius(c, tol, norm);
    let spread = points.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max);
    let mut failure = None;
    if spread <= radius && c.is_multiple_of(2) {
        match examine(phi, norm, centroid, c, radius, tol) {
            Ok(cls) => {
                out.push(cls);
                return Ok(());
            }
            Err(e) => failure = Some(e),
        }
    }
    if c <= 2 {
        return Err(failure.unwrap_or(Error::IllConditioned {
            context: format!("eigenvalue cluster near {centroid}"),
            gap: spread / norm.max(f64::MIN_POSITIVE),
        }));
    }
    for part in split_largest_gap(&points) {
        resolve(phi, norm, part, tol, out)?;
    }
    Ok(())
}

fn split_largest_gap(points: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = points.len();
    // Prim's algorithm; the MST's longest edge is the single-linkage cut.
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    let mut edges = Vec::with_capacity(n - 1);
    best[0] = (0.0, 0);
    for step in 0..n {
        let u = (0..n)
            .filter(|&i| !in_tree[i])
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0))
            .expect("vertices remain");
        in_tree[u] = true;
        if step > 0 {
            edges.push((best[u].0, best[u].1, u));
        }
        for v in 0..n {
            let d = (points[u] - points[v]).norm();
            if !in_tree[v] && d < best[v].0 {
                best[v] = (d, u);
            }
        }
    }
    let cut = edges.iter().map(|e| e.0).fold(0.0, f64::max);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(d, a, b) in &edges {
        if d < cut {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, &p) in points.iter().enumerate().take(n) {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(p),
            None => groups.push((r, vec![p])),
        }
    }
    groups.into_iter().map(|g| g.1).collect()
}

/// Nested kernels `K_t = null(B^t)`, each stored as an orthonormal basis.
struct Staircase {
    levels: Vec<Vec<CVec>>,
    ambiguous: Option<f64>,
}

fn project_out(q: &[CVec], m: &CMat) -> CMat {
    let mut r = m.clone();
    for _ in 0..2 {
        for qi in q {
            let c = qi.adjoint() * &r;
            r -= qi * c;
        }
    }
    r
}

fn staircase(b: &CMat, thr: f64) -> Staircase {
    let mut levels: Vec<Vec<CVec>> = Vec::new();
    let mut ambiguous: Option<f64> = None;
    let empty = Vec::new();
    loop {
        let prev = levels.last().unwrap_or(&empty);
        let m = project_out(prev, b);
        let s = cplx::svd(&m);
        let mut null = Vec::new();
        for (i, &sv) in s.values.iter().enumerate() {
            if sv <= thr {
                null.push(s.v.column(i).into_owned());
            } else if sv <= AMBIGUOUS_BAND * thr {
                ambiguous = Some(ambiguous.map_or(sv, |a: f64| a.min(sv)));
            }
        }
        if null.len() <= prev.len() || levels.len() >= b.nrows() {
            break;
        }
        levels.push(cplx::orthonormalize(&null, 1e-12));
    }
    Staircase { levels, ambiguous }
}

fn examine(
    phi: &CMat,
    norm: f64,
    centroid: Complex64,
    count: usize,
    radius: f64,
    tol: f64,
) -> Result<ClassAnalysis> {
    let real = centroid.im <= radius;
    let rep = if real { Complex64::new(centroid.re, 0.0) } else { centroid };
    let expected = if real { count } else { count / 2 };
    let n = phi.nrows();
    let shift = phi - CMat::identity(n, n) * rep;
    let thr = tol * norm.max(f64::MIN_POSITIVE);
    let st = staircase(&shift, thr);
    let context = || format!("Jordan structure at {rep}");
    if let Some(sv) = st.ambiguous {
        return Err(Error::IllConditioned { context: context(), gap: sv / norm });
    }
    let dims: Vec<usize> = st.levels.iter().map(Vec::len).collect();
    let total = dims.last().copied().unwrap_or(0);
    let increments: Vec<usize> = dims
        .iter()
        .scan(0, |prev, &d| {
            let inc = d - *prev;
            *prev = d;
            Some(inc)
        })
        .collect();
    if total != expected || (real && increments.iter().any(|i| i % 2 == 1)) {
        return Err(Error::IllConditioned {
            context: format!("{}: kernel dimensions {dims:?}, expected total {expected}", context()),
            gap: 0.0,
        });
    }
    let chains = build_chains(&shift, &st.levels, &increments, real);
    let mut sizes: Vec<usize> = chains.iter().map(|c| c.0).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(ClassAnalysis { rep, sizes, chains, shift })
}

/// Chooses chain tops level by level, from the longest chains down. For a
/// real class, every chosen top `x` is paired with `x j` and only `x` is
/// kept, since the pair spans one quaternionic chain.
fn build_chains(b: &CMat, levels: &[Vec<CVec>], increments: &[usize], real: bool) -> Vec<(usize, CVec)> {
    let top = levels.len();
    let mut all: Vec<(usize, CVec)> = Vec::new();
    let mut kept: Vec<(usize, CVec)> = Vec::new();
    for t in (1..=top).rev() {
        let ge_t = increments[t - 1];
        let ge_next = if t < top { increments[t] } else { 0 };
        let mut needed = ge_t - ge_next;
        if needed == 0 {
            continue;
        }
        let mut w: Vec<CVec> = if t >= 2 { levels[t - 2].clone() } else { Vec::new() };
        for (s, x) in &all {
            let mut v = x.clone();
            for _ in 0..(s - t) {
                v = b * v;
            }
            w.push(v);
        }
        let mut w = cplx::orthonormalize(&w, 1e-10);
        let kt = cplx::columns_to_matrix(b.nrows(), &levels[t - 1]);
        while needed > 0 {
            let r = project_out(&w, &kt);
            let s = cplx::svd(&r);
            let x: CVec = s.u.column(0).into_owned();
            let x = project_out(&w, &cplx::columns_to_matrix(b.nrows(), &[x])).column(0).into_owned();
            let x = &x / Complex64::new(x.norm(), 0.0);
            w = cplx::orthonormalize(&[w, vec![x.clone()]].concat(), 1e-10);
            all.push((t, x.clone()));
            kept.push((t, x.clone()));
            needed -= 1;
            if real {
                let xj = embedded_times_j(x.as_slice());
                w = cplx::orthonormalize(&[w, vec![xj.clone()]].concat(), 1e-10);
                all.push((t, xj));
                needed -= 1;
            }
        }
    }
    kept
}

/// Right-eigenvalue classes of `A`, sorted by modulus then argument.
pub fn right_eigenvalues(a: &HMatrix, tol: f64) -> Result<Vec<EigenClass>> {
    a.ensure_square()?;
    let spec = analyze(a, tol)?;
    let mut out: Vec<EigenClass> = spec
        .classes
        .iter()
        .map(|c| EigenClass { rep: c.rep, multiplicity: c.sizes.iter().sum() })
        .collect();
    sort_classes(&mut out);
    Ok(out)
}

/// Jordan block sizes (descending) belonging to one eigenvalue class.
pub fn block_structure(a: &HMatrix, cls: &EigenClass, tol: f64) -> Result<Vec<usize>> {
    a.ensure_square()?;
    let spec = analyze(a, tol)?;
    let target = cls.rep;
    let (_, norm) = embedded(a)?;
    spec.classes
        .iter()
        .map(|c| (c, (c.rep - target).norm()))
        .filter(|(c, d)| {
            let r = cluster_radius(2 * c.sizes.iter().sum::<usize>(), tol, norm.max(1.0));
            *d <= r.max(tol * (1.0 + target.norm()))
        })
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(c, _)| c.sizes.clone())
        .ok_or(Error::UnknownEigenvalue { re: target.re, im: target.im })
}

pub fn is_semisimple(a: &HMatrix, tol: f64) -> Result<bool> {
    a.ensure_square()?;
    Ok(analyze(a, tol)?.classes.iter().all(|c| c.sizes.iter().all(|&s| s == 1)))
}

/// Quaternionic Jordan form `S A S⁻¹ = ⊕ J(rep, size)` with blocks sorted
/// by modulus, then size, then argument.
pub fn jordan_decomposition(a: &HMatrix, tol: f64) -> Result<JordanData> {
    let n1 = a.ensure_square()?;
    let spec = analyze(a, tol)?;
    let mut chains: Vec<(JordanBlock, Vec<HVector>)> = Vec::new();
    for cls in &spec.classes {
        for (size, x) in &cls.chains {
            let mut vecs = vec![x.clone()];
            for _ in 1..*size {
                let next = &cls.shift * vecs.last().expect("nonempty");
                vecs.push(next);
            }
            // Column order e_1..e_k runs from the eigenvector up to the top.
            let cols: Vec<HVector> = vecs.iter().rev().map(|v| pullback_vector(v.as_slice())).collect();
            chains.push((JordanBlock::new(cls.rep, *size), cols));
        }
    }
    chains.sort_by(|(a, _), (b, _)| {
        a.modulus()
            .total_cmp(&b.modulus())
            .then(a.size.cmp(&b.size))
            .then(a.im.total_cmp(&b.im))
    });
    let cols: Vec<HVector> = chains.iter().flat_map(|c| c.1.iter().cloned()).collect();
    if cols.len() != n1 {
        return Err(Error::IllConditioned {
            context: format!("found {} Jordan basis vectors for dimension {n1}", cols.len()),
            gap: 0.0,
        });
    }
    let p = HMatrix::from_columns(&cols)?;
    let s = p.inverse().map_err(|_| Error::IllConditioned {
        context: "Jordan basis is numerically dependent".into(),
        gap: 1.0 / p.condition_number(),
    })?;
    let data = JordanData { blocks: chains.into_iter().map(|c| c.0).collect(), s };
    let res = data.s.matmul(a)?.matmul(&p)?.max_abs_diff(&data.jordan_matrix());
    if res > RECONSTRUCTION_TOL * a.max_norm().max(1.0) {
        return Err(Error::IllConditioned { context: "Jordan reconstruction".into(), gap: res });
    }
    Ok(data)
}

/// Maximal runs `(start, len)` of a matrix that must be upper bidiagonal,
/// with superdiagonal links only between equal diagonal entries that commute
/// with the link.
fn bidiagonal_runs<T: crate::quat::Scalar>(
    a: &HMatrix<T>,
    same: impl Fn(&Quaternion<T>, &Quaternion<T>) -> bool,
    commute: impl Fn(&Quaternion<T>, &Quaternion<T>) -> bool,
) -> Result<Vec<(usize, usize)>> {
    let n = a.ensure_square()?;
    for i in 0..n {
        for j in 0..n {
            if j != i && j != i + 1 && !a[(i, j)].is_zero() {
                return Err(Error::Parse(format!(
                    "assume-jordan input has a nonzero entry at ({}, {}) off the upper bidiagonal",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 0..n {
        let link = i + 1 < n && !a[(i, i + 1)].is_zero();
        if link {
            let (d, e, s) = (&a[(i, i)], &a[(i + 1, i + 1)], &a[(i, i + 1)]);
            if !same(d, e) {
                return Err(Error::Parse(format!(
                    "assume-jordan input links unequal diagonal entries at rows {} and {}",
                    i + 1,
                    i + 2
                )));
            }
            if !commute(d, s) {
                return Err(Error::Parse(format!(
                    "assume-jordan superdiagonal entry at ({}, {}) does not commute with the diagonal",
                    i + 1,
                    i + 2
                )));
            }
        } else {
            runs.push((start, i + 1 - start));
            start = i + 1;
        }
    }
    Ok(runs)
}

/// Reads the Jordan structure of a matrix that is already a direct sum of
/// blocks `λ` on the diagonal and nonzero commuting links above it (for
/// example `λ J(1, k)`). `S` is the diagonal matrix carrying each block onto
/// `J(rep, k)`; it is the identity for literal Jordan forms. Blocks keep
/// their order along the diagonal.
pub fn jordan_from_structure(a: &HMatrix) -> Result<JordanData> {
    let same = |x: &Quaternion<f64>, y: &Quaternion<f64>| {
        x.approx_eq(y, 1e-12 * x.norm().max(y.norm()).max(1.0))
    };
    let commute = |x: &Quaternion<f64>, y: &Quaternion<f64>| {
        (*x * *y - *y * *x).norm() <= 1e-12 * (x.norm() * y.norm()).max(1.0)
    };
    let runs = bidiagonal_runs(a, same, commute)?;
    let n = a.rows();
    let mut d = vec![Quaternion::one(); n];
    let mut blocks = Vec::with_capacity(runs.len());
    for &(start, len) in &runs {
        let lambda = a[(start, start)];
        d[start] = lambda.canonicalizer();
        for i in start..start + len - 1 {
            d[i + 1] = d[i] * a[(i, i + 1)];
        }
        blocks.push(JordanBlock::new(lambda.canonical_rep(), len));
    }
    let s = HMatrix::diagonal(&d);
    Ok(JordanData { blocks, s })
}

/// A block of an exactly specified Jordan-structured matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactBlock {
    pub diagonal: ExactQuaternion,
    pub size: usize,
}

impl ExactBlock {
    pub fn modulus_sqr(&self) -> BigRational {
        self.diagonal.norm_sqr()
    }

    pub fn is_unit(&self) -> bool {
        self.modulus_sqr().is_one()
    }
}

/// Exact counterpart of [`jordan_from_structure`]; blocks in diagonal order.
pub fn exact_structure(a: &ExactMatrix) -> Result<Vec<ExactBlock>> {
    let runs = bidiagonal_runs(a, |x, y| x == y, |x, y| x.commutes_with(y))?;
    Ok(runs
        .into_iter()
        .map(|(start, size)| ExactBlock { diagonal: a[(start, start)].clone(), size })
        .collect())
}

/// Exact comparison of two blocks' growth: squared modulus, then size.
pub fn exact_growth_cmp(a: &ExactBlock, b: &ExactBlock, backward: bool) -> Ordering {
    let (ma, mb) = (a.modulus_sqr(), b.modulus_sqr());
    let by_modulus = if backward { mb.cmp(&ma) } else { ma.cmp(&mb) };
    by_modulus.then(a.size.cmp(&b.size))
}

/// True when every diagonal entry is nonzero.
pub fn exact_invertible(blocks: &[ExactBlock]) -> bool {
    blocks.iter().all(|b| !b.modulus_sqr().is_zero())
}
