//! The equicontinuity region of a cyclic group `⟨γ⟩`, described by its
//! complement: zero, one or two projective subspaces.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    classify, classify_exact, limit_kernel, limit_kernel_exact, Direction, DynamicalType, DEFAULT_UNIT_TOL,
};
use crate::error::{Error, Result};
use crate::hmat::{ExactMatrix, HMatrix};
use crate::projective::{ExactSubspace, ProjectiveSubspace};
use crate::spectral::{exact_invertible, exact_structure, jordan_decomposition, jordan_from_structure, JordanData, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Numerical Jordan decomposition of arbitrary input.
    #[default]
    General,
    /// Input already is a direct sum of Jordan-type blocks.
    AssumeJordan,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative threshold for spectral rank decisions.
    pub spectral: f64,
    /// Distance from 1 under which an eigenvalue modulus counts as unit.
    pub unit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { spectral: DEFAULT_TOL, unit: DEFAULT_UNIT_TOL }
    }
}

/// Complement of `Eq(⟨γ⟩)` in original and Jordan coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqRegionReport {
    #[serde(rename = "type")]
    pub dyn_type: DynamicalType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<Vec<ProjectiveSubspace>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement_jordan: Option<Vec<ProjectiveSubspace>>,
    pub jordan: JordanData,
    pub notes: Vec<String>,
}

impl EqRegionReport {
    /// Complement in original coordinates (empty when omitted).
    pub fn original(&self) -> &[ProjectiveSubspace] {
        self.complement.as_deref().unwrap_or(&[])
    }

    pub fn in_jordan_coords(&self) -> &[ProjectiveSubspace] {
        self.complement_jordan.as_deref().unwrap_or(&[])
    }
}

fn ensure_invertible(gamma: &HMatrix) -> Result<usize> {
    let n = gamma.ensure_square()?;
    if gamma.rank_default() < n {
        return Err(Error::Singular { det: gamma.det_h()? });
    }
    Ok(n)
}

pub fn jordan_data(gamma: &HMatrix, mode: Mode, tol: &Tolerances) -> Result<JordanData> {
    ensure_invertible(gamma)?;
    match mode {
        Mode::General => jordan_decomposition(gamma, tol.spectral),
        Mode::AssumeJordan => jordan_from_structure(gamma),
    }
}

pub fn eq_region(gamma: &HMatrix, mode: Mode, tol: &Tolerances) -> Result<EqRegionReport> {
    let jd = jordan_data(gamma, mode, tol)?;
    let mut report = eq_region_from_jordan(jd, tol.unit)?;
    report.notes.insert(
        0,
        match mode {
            Mode::General => "numerical Jordan decomposition".to_string(),
            Mode::AssumeJordan => "input read as a Jordan direct sum".to_string(),
        },
    );
    Ok(report)
}

fn wrong_type(expected: &str, found: DynamicalType) -> Error {
    Error::WrongType { expected: expected.into(), found: found.to_string() }
}

/// Single complement subspace of a parabolic element: every Jordan basis
/// vector except the last vector of each block of maximal size.
pub fn eq_region_parabolic(j: &JordanData, unit_tol: f64) -> Result<ProjectiveSubspace> {
    let t = classify(j, unit_tol);
    if t != DynamicalType::Parabolic {
        return Err(wrong_type("parabolic", t));
    }
    Ok(limit_kernel(j, Direction::Forward, unit_tol))
}

/// Forward and backward limit kernels of a loxodromic or loxoparabolic
/// element, in Jordan coordinates.
pub fn eq_region_two_sided(j: &JordanData, unit_tol: f64) -> Result<(ProjectiveSubspace, ProjectiveSubspace)> {
    let t = classify(j, unit_tol);
    if !t.is_two_sided() {
        return Err(wrong_type("loxodromic or loxoparabolic", t));
    }
    Ok((limit_kernel(j, Direction::Forward, unit_tol), limit_kernel(j, Direction::Backward, unit_tol)))
}

/// Assembles the report from Jordan data, transporting each kernel back to
/// original coordinates through `S⁻¹`.
pub fn eq_region_from_jordan(jd: JordanData, unit_tol: f64) -> Result<EqRegionReport> {
    let t = classify(&jd, unit_tol);
    let (jordan_side, note) = match t {
        DynamicalType::Elliptic => (vec![], "elliptic: semisimple with unit moduli, empty complement"),
        DynamicalType::Parabolic => (
            vec![eq_region_parabolic(&jd, unit_tol)?],
            "parabolic: one subspace, all basis vectors but the last of each largest block",
        ),
        _ => {
            let (fwd, bwd) = eq_region_two_sided(&jd, unit_tol)?;
            (vec![fwd, bwd], "two-sided: forward and backward limit kernels of the fastest growing blocks")
        }
    };
    let s_inv = jd.s_inverse()?;
    let original = jordan_side.iter().map(|k| k.transform(&s_inv)).collect::<Result<Vec<_>>>()?;
    Ok(EqRegionReport {
        dyn_type: t,
        complement: Some(original),
        complement_jordan: Some(jordan_side),
        jordan: jd,
        notes: vec![note.to_string()],
    })
}

/// Region computed with exact rational arithmetic on Jordan-structured
/// input. The exact complement consists of coordinate subspaces, which the
/// diagonal normalizing matrix leaves unchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactRegion {
    pub report: EqRegionReport,
    pub exact_complement: Vec<ExactSubspace>,
}

pub fn eq_region_exact(gamma: &ExactMatrix) -> Result<ExactRegion> {
    let blocks = exact_structure(gamma)?;
    if !exact_invertible(&blocks) {
        return Err(Error::Singular { det: 0.0 });
    }
    let t = classify_exact(&blocks);
    let exact_complement = match t {
        DynamicalType::Elliptic => vec![],
        DynamicalType::Parabolic => vec![limit_kernel_exact(&blocks, Direction::Forward)],
        _ => vec![
            limit_kernel_exact(&blocks, Direction::Forward),
            limit_kernel_exact(&blocks, Direction::Backward),
        ],
    };
    let jordan = jordan_from_structure(&gamma.to_f64())?;
    let floats = exact_complement.iter().map(ExactSubspace::to_f64).collect::<Result<Vec<_>>>()?;
    let report = EqRegionReport {
        dyn_type: t,
        complement: Some(floats.clone()),
        complement_jordan: Some(floats),
        jordan,
        notes: vec!["exact rational arithmetic on a Jordan direct sum".to_string()],
    };
    Ok(ExactRegion { report, exact_complement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;

    type Q = Quaternion<f64>;

    fn cis(t: f64) -> Q {
        let a = 2.0 * std::f64::consts::PI * t;
        Q::new(a.cos(), a.sin(), 0.0, 0.0)
    }

    fn coord(n1: usize, idx: &[usize]) -> ProjectiveSubspace {
        ProjectiveSubspace::coordinate(n1, idx)
    }

    #[test]
    fn elliptic_has_empty_complement() {
        let g = HMatrix::diagonal(&[cis(0.3), cis(0.7)]);
        for mode in [Mode::General, Mode::AssumeJordan] {
            let r = eq_region(&g, mode, &Tolerances::default()).unwrap();
            assert_eq!(r.dyn_type, DynamicalType::Elliptic);
            assert!(r.original().is_empty());
        }
    }

    #[test]
    fn parabolic_single_block() {
        for n1 in 2..=6 {
            let g = HMatrix::jordan_block(Q::one(), n1);
            let r = eq_region(&g, Mode::AssumeJordan, &Tolerances::default()).unwrap();
            assert_eq!(r.dyn_type, DynamicalType::Parabolic);
            assert_eq!(r.original(), &[coord(n1, &(0..n1 - 1).collect::<Vec<_>>())]);
        }
    }

    #[test]
    fn loxodromic_groups() {
        let g = HMatrix::diagonal(&[Q::one(), Q::one(), Q::real(3.0)]);
        let r = eq_region(&g, Mode::AssumeJordan, &Tolerances::default()).unwrap();
        assert_eq!(r.original(), &[coord(3, &[0, 1]), coord(3, &[2])]);
        // General mode reorders blocks; original coordinates are unaffected.
        let g = HMatrix::diagonal(&[Q::real(2.0), Q::real(0.5)]);
        let r = eq_region(&g, Mode::General, &Tolerances::default()).unwrap();
        assert_eq!(r.in_jordan_coords(), &[coord(2, &[0]), coord(2, &[1])]);
        let orig = r.original();
        assert!(orig[0].approx_eq(&coord(2, &[1]), 1e-12));
        assert!(orig[1].approx_eq(&coord(2, &[0]), 1e-12));
    }

    #[test]
    fn wrong_types_are_rejected() {
        let jd = jordan_from_structure(&HMatrix::jordan_block(Q::one(), 3)).unwrap();
        assert!(matches!(eq_region_two_sided(&jd, 1e-6), Err(Error::WrongType { .. })));
        let jd = jordan_from_structure(&HMatrix::diagonal(&[Q::real(2.0), Q::one()])).unwrap();
        assert!(matches!(eq_region_parabolic(&jd, 1e-6), Err(Error::WrongType { .. })));
    }

    #[test]
    fn singular_input() {
        let g = HMatrix::diagonal(&[Q::one(), Q::zero()]);
        assert!(matches!(eq_region(&g, Mode::General, &Tolerances::default()), Err(Error::Singular { .. })));
        assert!(matches!(eq_region_exact(&g.to_exact().unwrap()), Err(Error::Singular { .. })));
    }

    #[test]
    fn exact_loxoparabolic() {
        let quarter = Q::real(0.25);
        let g = HMatrix::direct_sum(&[
            HMatrix::from_fn(2, 2, |i, j| if j == i || j == i + 1 { quarter } else { Q::zero() }),
            HMatrix::jordan_block(Q::one(), 3),
        ]);
        let r = eq_region_exact(&g.to_exact().unwrap()).unwrap();
        assert_eq!(r.report.dyn_type, DynamicalType::Loxoparabolic);
        assert!(r.exact_complement[0].same_as(&ExactSubspace::coordinate(5, &[0, 1, 2, 3])));
        assert!(r.exact_complement[1].same_as(&ExactSubspace::coordinate(5, &[0, 2, 3, 4])));
    }

    #[test]
    fn report_json_roundtrip() {
        let g = HMatrix::direct_sum(&[HMatrix::jordan_block(Q::one(), 2), HMatrix::diagonal(&[Q::k()])]);
        let r = eq_region(&g, Mode::General, &Tolerances::default()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: EqRegionReport = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
        assert!(s.starts_with(r#"{"type":"Parabolic","complement":["#));
    }
}
