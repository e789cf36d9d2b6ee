//! Dynamical type of a transformation, normalized powers, and the kernels of
//! limits of `γ^m` as `m → ±∞`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cplx;
use crate::error::{Error, Result};
use crate::hmat::HMatrix;
use crate::projective::{ExactSubspace, ProjectiveSubspace};
use crate::spectral::{exact_growth_cmp, ExactBlock, JordanData};

/// Moduli within this distance of 1 count as unit.
pub const DEFAULT_UNIT_TOL: f64 = 1e-6;

/// Largest `|m|` accepted by [`normalized_power`].
pub const POWER_CAP: u32 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DynamicalType {
    Elliptic,
    Parabolic,
    Loxodromic,
    Loxoparabolic,
}

impl DynamicalType {
    fn from_flags(semisimple: bool, all_unit: bool) -> Self {
        match (semisimple, all_unit) {
            (true, true) => Self::Elliptic,
            (false, true) => Self::Parabolic,
            (true, false) => Self::Loxodromic,
            (false, false) => Self::Loxoparabolic,
        }
    }

    /// Loxodromic and loxoparabolic elements have distinct forward and
    /// backward limit kernels.
    pub fn is_two_sided(self) -> bool {
        matches!(self, Self::Loxodromic | Self::Loxoparabolic)
    }
}

impl fmt::Display for DynamicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Self::Forward => 1.0,
            Self::Backward => -1.0,
        }
    }
}

/// Eigenvalue moduli of the lift rescaled to Study determinant 1, that is,
/// divided by their geometric mean weighted by block size. A transformation
/// determines its lift only up to a real factor, so only these normalized
/// moduli carry meaning.
pub fn normalized_moduli(j: &JordanData) -> Vec<f64> {
    let logs: Vec<f64> = j.blocks.iter().map(|b| b.modulus().ln()).collect();
    let mean = j.blocks.iter().zip(&logs).map(|(b, l)| b.size as f64 * l).sum::<f64>() / j.dim() as f64;
    logs.iter().map(|l| (l - mean).exp()).collect()
}

pub fn classify(j: &JordanData, unit_tol: f64) -> DynamicalType {
    let all_unit = normalized_moduli(j).iter().all(|m| (m - 1.0).abs() < unit_tol);
    DynamicalType::from_flags(j.is_semisimple(), all_unit)
}

/// Exact classification. The normalized moduli are all unit exactly when
/// the squared moduli coincide.
pub fn classify_exact(blocks: &[ExactBlock]) -> DynamicalType {
    let semisimple = blocks.iter().all(|b| b.size == 1);
    let first = blocks.first().map(ExactBlock::modulus_sqr);
    let all_unit = blocks.iter().all(|b| Some(b.modulus_sqr()) == first);
    DynamicalType::from_flags(semisimple, all_unit)
}

/// Asymptotic size of `J(λ, k)^m`: `|λ|^m m^{k-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthOrder {
    pub log_modulus: f64,
    pub poly_degree: usize,
}

impl GrowthOrder {
    /// Lexicographic comparison treating log-moduli within `tol` as tied.
    pub fn cmp_tol(&self, other: &Self, tol: f64) -> Ordering {
        let d = self.log_modulus - other.log_modulus;
        if d.abs() > tol {
            d.total_cmp(&0.0)
        } else {
            self.poly_degree.cmp(&other.poly_degree)
        }
    }
}

/// Per-block growth orders in the given direction. Backward growth negates
/// the log-modulus and keeps the degree, since `J(λ,k)⁻¹` is similar to
/// `J(λ⁻¹,k)`.
pub fn growth_orders(j: &JordanData, direction: Direction) -> Vec<GrowthOrder> {
    j.blocks
        .iter()
        .map(|b| GrowthOrder {
            log_modulus: direction.sign() * b.modulus().ln(),
            poly_degree: b.size - 1,
        })
        .collect()
}

/// Maximal growth order and every block attaining it.
pub fn dominant_growth(j: &JordanData, direction: Direction, tol: f64) -> (GrowthOrder, Vec<usize>) {
    let orders = growth_orders(j, direction);
    let max = orders
        .iter()
        .copied()
        .reduce(|a, b| if b.cmp_tol(&a, tol) == Ordering::Greater { b } else { a })
        .expect("Jordan data has at least one block");
    let achievers = orders
        .iter()
        .enumerate()
        .filter(|(_, g)| g.cmp_tol(&max, tol) == Ordering::Equal)
        .map(|(i, _)| i)
        .collect();
    (max, achievers)
}

pub fn forward_growth(j: &JordanData) -> (GrowthOrder, Vec<usize>) {
    dominant_growth(j, Direction::Forward, DEFAULT_UNIT_TOL)
}

fn drop_last_of(sizes: &[usize], achievers: &[usize]) -> Vec<usize> {
    let mut keep = Vec::new();
    let mut start = 0;
    for (i, &k) in sizes.iter().enumerate() {
        let end = if achievers.contains(&i) { start + k - 1 } else { start + k };
        keep.extend(start..end);
        start += k;
    }
    keep
}

/// Kernel of every limit of normalized `γ^{±m}`, in Jordan coordinates: all
/// basis vectors except the last vector of each block of maximal growth.
/// Empty for elliptic data.
pub fn limit_kernel(j: &JordanData, direction: Direction, unit_tol: f64) -> ProjectiveSubspace {
    let n1 = j.dim();
    if classify(j, unit_tol) == DynamicalType::Elliptic {
        return ProjectiveSubspace::empty(n1);
    }
    let (_, achievers) = dominant_growth(j, direction, unit_tol);
    let sizes: Vec<usize> = j.blocks.iter().map(|b| b.size).collect();
    ProjectiveSubspace::coordinate(n1, &drop_last_of(&sizes, &achievers))
}

/// Exact counterpart of [`limit_kernel`] for Jordan-structured input.
pub fn limit_kernel_exact(blocks: &[ExactBlock], direction: Direction) -> ExactSubspace {
    let n1 = blocks.iter().map(|b| b.size).sum();
    if classify_exact(blocks) == DynamicalType::Elliptic {
        return ExactSubspace::coordinate(n1, &[]);
    }
    let backward = direction == Direction::Backward;
    let max = blocks
        .iter()
        .reduce(|a, b| if exact_growth_cmp(b, a, backward) == Ordering::Greater { b } else { a })
        .expect("at least one block");
    let achievers: Vec<usize> = blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| exact_growth_cmp(b, max, backward) == Ordering::Equal)
        .map(|(i, _)| i)
        .collect();
    let sizes: Vec<usize> = blocks.iter().map(|b| b.size).collect();
    ExactSubspace::coordinate(n1, &drop_last_of(&sizes, &achievers))
}

/// A nonzero, possibly singular matrix acting on `ℙⁿ_ℍ` off its kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoProjectiveMap {
    pub matrix: HMatrix,
    pub kernel: ProjectiveSubspace,
    pub image: ProjectiveSubspace,
}

pub fn pseudo_from_matrix(m: &HMatrix, tol: f64) -> Result<PseudoProjectiveMap> {
    let n1 = m.ensure_square()?;
    if m.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let phi = m.embed_phi()?;
    let kernel = ProjectiveSubspace::from_embedded(n1, &cplx::null_vectors(&phi, tol))?;
    let image = ProjectiveSubspace::from_embedded(n1, &cplx::range_vectors(&phi, tol))?;
    Ok(PseudoProjectiveMap { matrix: m.clone(), kernel, image })
}

fn rescaled(m: HMatrix) -> Result<HMatrix> {
    let (max, _) = m.max_entry_norm().map_err(|_| Error::PowerOverflowGuard)?;
    if !max.is_finite() {
        return Err(Error::PowerOverflowGuard);
    }
    Ok(m.scale(&(1.0 / max)))
}

/// `γ^m` divided by its largest entry modulus, multiplying one factor at a
/// time and rescaling after every step. Negative `m` uses `γ⁻¹`.
pub fn normalized_power(gamma: &HMatrix, m: i64) -> Result<HMatrix> {
    normalized_power_capped(gamma, m, POWER_CAP)
}

pub fn normalized_power_capped(gamma: &HMatrix, m: i64, cap: u32) -> Result<HMatrix> {
    let n = gamma.ensure_square()?;
    if m.unsigned_abs() > cap as u64 {
        return Err(Error::PowerCap { requested: m, cap });
    }
    let base = if m < 0 { gamma.inverse()? } else { gamma.clone() };
    let base = rescaled(base)?;
    let mut acc = HMatrix::identity(n);
    for _ in 0..m.unsigned_abs() {
        acc = rescaled(acc.matmul(&base)?)?;
    }
    Ok(acc)
}

/// Normalized `γ^{±2^s}` for `s = 0..=doublings`, by repeated squaring.
pub fn doubling_ladder(gamma: &HMatrix, direction: Direction, doublings: usize) -> Result<Vec<HMatrix>> {
    gamma.ensure_square()?;
    let base = match direction {
        Direction::Forward => gamma.clone(),
        Direction::Backward => gamma.inverse()?,
    };
    let mut rungs = vec![rescaled(base)?];
    for _ in 0..doublings {
        let last = rungs.last().expect("nonempty");
        let next = rescaled(last.matmul(last)?)?;
        rungs.push(next);
    }
    Ok(rungs)
}
