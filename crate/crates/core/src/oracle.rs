//! Independent numerical checks of an equicontinuity report.
//!
//! Two estimators, neither of which uses the growth rule:
//!
//! * the crushed subspace, read off the small singular values of normalized
//!   powers `γ^{±2^s}` obtained by repeated squaring;
//! * orbit-separation probes, which push a point and nearby points through
//!   `γ^m` for `|m| ≤ max_power` and through the squaring ladder, and watch
//!   whether the separation shrinks with the initial distance.
//!
//! Verification runs both on the Jordan model `⊕ J(rep, size)` and checks
//! separately that `S γ S⁻¹` reproduces that model. Squaring `γ` in its own
//! coordinates would cancel catastrophically whenever the normalized limit
//! is nilpotent, which is exactly the parabolic case.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cplx;
use crate::dynamics::{doubling_ladder, Direction, DynamicalType};
use crate::eqregion::EqRegionReport;
use crate::error::{Error, Result};
use crate::hmat::{pullback_vector, HMatrix};
use crate::projective::{inner, point_dist, subspace_dist, vnorm, HVector, ProjectivePoint, ProjectiveSubspace};
use crate::quat::Quaternion;

/// Reconstruction residual allowed between `S γ S⁻¹` and the Jordan model,
/// relative to `max(1, |γ|_max)`.
pub const RECONSTRUCTION_TOL: f64 = 1e-6;

/// Agreement required between crushed subspaces and the report.
pub const SUBSPACE_TOL: f64 = 1e-6;

/// Minimal shrink factor of the separation per rung of the ε ladder.
const RATIO: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Largest `|m|` iterated one step at a time.
    pub max_power: u32,
    /// Initial distances, strictly decreasing.
    pub eps_ladder: Vec<f64>,
    /// Separation above which orbits count as torn apart.
    pub separation_threshold: f64,
    /// Random neighbours per point and per ε.
    pub samples_per_point: usize,
    /// Squarings beyond the single steps: powers `2^s` up to `2^doublings`.
    pub doublings: usize,
    /// Singular values of normalized powers below this count as crushed.
    pub crush_tol: f64,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            max_power: 200,
            eps_ladder: vec![1e-2, 1e-4, 1e-6],
            separation_threshold: 0.1,
            samples_per_point: 8,
            doublings: 40,
            crush_tol: 1e-8,
            seed: 0,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        let ladder_ok = !self.eps_ladder.is_empty()
            && self.eps_ladder.iter().all(|&e| e > 0.0 && e < 1.0)
            && self.eps_ladder.windows(2).all(|w| w[0] > w[1]);
        if !ladder_ok {
            return Err(Error::Parse("eps_ladder must be strictly decreasing in (0, 1)".into()));
        }
        if !(self.separation_threshold > 0.0 && self.separation_threshold < 1.0) {
            return Err(Error::Parse("separation_threshold must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Kernel shared by the limits of normalized `γ^{±2^s}`: right-singular
/// directions with `σ < crush_tol · σ_max` on the last rung, provided their
/// number is the same on the last three rungs.
pub fn crushed_subspace(gamma: &HMatrix, direction: Direction, cfg: &ProbeConfig) -> Result<ProjectiveSubspace> {
    let n1 = gamma.ensure_square()?;
    let ladder = doubling_ladder(gamma, direction, cfg.doublings)?;
    let mut dims = Vec::with_capacity(ladder.len());
    let mut last = Vec::new();
    for rung in &ladder {
        let null = cplx::null_vectors(&rung.embed_phi()?, cfg.crush_tol);
        dims.push(null.len().div_ceil(2));
        last = null;
    }
    let tail = &dims[dims.len().saturating_sub(3)..];
    if tail.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Unstable { dims });
    }
    ProjectiveSubspace::from_embedded(n1, &last)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProbeVerdict {
    Equicontinuous,
    NotEquicontinuous,
    Inconclusive,
}

/// Verdict plus the measured supremum separation for every ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub verdict: ProbeVerdict,
    pub sup_separation: Vec<f64>,
}

/// Normalized powers used by the probes, in both directions.
struct Rungs {
    maps: Vec<HMatrix>,
}

impl Rungs {
    fn new(gamma: &HMatrix, cfg: &ProbeConfig) -> Result<Self> {
        let n = gamma.ensure_square()?;
        let inv = gamma.inverse()?;
        let mut maps = Vec::new();
        for base in [gamma, &inv] {
            let scale = base.max_norm();
            let base = base.scale(&(1.0 / scale));
            let mut acc = HMatrix::identity(n);
            for _ in 0..cfg.max_power {
                acc = acc.matmul(&base)?;
                let s = acc.max_norm();
                if s == 0.0 || !s.is_finite() {
                    return Err(Error::PowerOverflowGuard);
                }
                acc = acc.scale(&(1.0 / s));
                maps.push(acc.clone());
            }
        }
        for direction in [Direction::Forward, Direction::Backward] {
            let ladder = doubling_ladder(gamma, direction, cfg.doublings)?;
            maps.extend(
                ladder
                    .into_iter()
                    .enumerate()
                    .filter(|(s, _)| (1u128 << s) > cfg.max_power as u128)
                    .map(|(_, m)| m),
            );
        }
        Ok(Self { maps })
    }
}

fn unit(v: &[Quaternion<f64>]) -> HVector {
    let n = vnorm(v);
    v.iter().map(|q| q.scale(&(1.0 / n))).collect()
}

/// Component of `t` orthogonal to the unit vector `p`.
fn orthogonal_part(p: &[Quaternion<f64>], t: &[Quaternion<f64>]) -> HVector {
    let c = inner(p, t);
    t.iter().zip(p).map(|(ti, pi)| *ti - *pi * c).collect()
}

/// `cos θ · p + sin θ · t` for unit `p ⊥ t`, at distance `sin θ = eps`.
fn neighbour(p: &[Quaternion<f64>], t: &[Quaternion<f64>], eps: f64) -> HVector {
    let c = (1.0 - eps * eps).sqrt();
    p.iter().zip(t).map(|(a, b)| a.scale(&c) + b.scale(&eps)).collect()
}

fn random_direction(p: &[Quaternion<f64>], rng: &mut ChaCha8Rng) -> Option<HVector> {
    for _ in 0..16 {
        let t: HVector = (0..p.len())
            .map(|_| {
                Quaternion::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        let t = orthogonal_part(p, &t);
        if vnorm(&t) > 1e-3 {
            return Some(unit(&t));
        }
    }
    None
}

/// Direction orthogonal to `p` that `N` stretches most.
fn lateral_direction(n: &HMatrix, p: &[Quaternion<f64>]) -> Result<Option<HVector>> {
    let k = p.len();
    let proj = HMatrix::from_fn(k, k, |i, j| {
        let pij = p[i] * p[j].conj();
        if i == j {
            Quaternion::one() - pij
        } else {
            -pij
        }
    });
    let s = cplx::svd(&n.matmul(&proj)?.embed_phi()?);
    if s.values.first().is_none_or(|&v| v == 0.0) {
        return Ok(None);
    }
    let t = orthogonal_part(p, &pullback_vector(s.v.column(0).as_slice()));
    Ok((vnorm(&t) > 1e-12).then(|| unit(&t)))
}

/// Perturbation `q = p + t`, `t ⊥ p`, chosen so that the component of `N q`
/// along `N p` cancels as far as the budget `eps` allows. Returns `q`.
fn cancelling_neighbour(n: &HMatrix, p: &[Quaternion<f64>], np: &[Quaternion<f64>], eps: f64) -> Result<Option<HVector>> {
    let u = unit(np);
    let a = n.conj_transpose().mul_vec(&u)?;
    let pa = orthogonal_part(p, &a);
    let pa_norm = vnorm(&pa);
    if pa_norm == 0.0 || !pa_norm.is_finite() {
        return Ok(None);
    }
    let s = (eps / (1.0 - eps * eps).sqrt()).min(vnorm(np) / pa_norm);
    Ok(Some(p.iter().zip(&pa).map(|(x, y)| *x - y.scale(&(s / pa_norm))).collect()))
}

fn separation(n: &HMatrix, np: &ProjectivePoint, q: &[Quaternion<f64>]) -> Result<Option<f64>> {
    let nq = n.mul_vec(q)?;
    match ProjectivePoint::new(nq) {
        Ok(nq) => Ok(Some(point_dist(np, &nq)?)),
        Err(_) => Ok(None),
    }
}

fn probe_with(rungs: &Rungs, p: &ProjectivePoint, cfg: &ProbeConfig, rng: &mut ChaCha8Rng) -> Result<ProbeOutcome> {
    let p_hat = p.normalized();
    let mut directions: Vec<HVector> = Vec::new();
    for _ in 0..cfg.samples_per_point {
        directions.extend(random_direction(&p_hat, rng));
    }
    let mut sups = Vec::with_capacity(cfg.eps_ladder.len());
    for &eps in &cfg.eps_ladder {
        let fixed: Vec<HVector> = directions.iter().map(|t| neighbour(&p_hat, t, eps)).collect();
        let mut sup: f64 = 0.0;
        for n in &rungs.maps {
            let np_vec = n.mul_vec(&p_hat)?;
            let Ok(np) = ProjectivePoint::new(np_vec.clone()) else { continue };
            if !vnorm(&np_vec).is_normal() {
                continue;
            }
            for q in &fixed {
                sup = sup.max(separation(n, &np, q)?.unwrap_or(0.0));
            }
            if let Some(t) = lateral_direction(n, &p_hat)? {
                sup = sup.max(separation(n, &np, &neighbour(&p_hat, &t, eps))?.unwrap_or(0.0));
            }
            if let Some(q) = cancelling_neighbour(n, &p_hat, &np_vec, eps)? {
                sup = sup.max(separation(n, &np, &q)?.unwrap_or(0.0));
            }
        }
        sups.push(sup);
    }
    Ok(ProbeOutcome { verdict: verdict(&sups, cfg), sup_separation: sups })
}

fn verdict(sups: &[f64], cfg: &ProbeConfig) -> ProbeVerdict {
    let th = cfg.separation_threshold;
    if sups.iter().all(|&s| s > th) {
        return ProbeVerdict::NotEquicontinuous;
    }
    let shrinking = sups.windows(2).all(|w| w[1] == 0.0 || w[0] / w[1] >= RATIO);
    if shrinking && sups.last().is_some_and(|&s| s < th) {
        ProbeVerdict::Equicontinuous
    } else {
        ProbeVerdict::Inconclusive
    }
}

/// Orbit-separation test at `p`: perturb `p` by each ε of the ladder and
/// record the largest projective distance between the orbits.
pub fn equicontinuity_probe(gamma: &HMatrix, p: &ProjectivePoint, cfg: &ProbeConfig) -> Result<ProbeOutcome> {
    cfg.validate()?;
    let rungs = Rungs::new(gamma, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    probe_with(&rungs, p, cfg, &mut rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Reconstruction,
    Complement,
    Consistency,
    Probe,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    /// Measured distance or residual, when the check has one.
    pub value: Option<f64>,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<HVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub passed: bool,
    #[serde(rename = "type")]
    pub dyn_type: DynamicalType,
    pub seed: u64,
    pub config: ProbeConfig,
    pub checks: Vec<Check>,
}

impl VerificationSummary {
    pub fn count(&self, kind: CheckKind) -> usize {
        self.checks.iter().filter(|c| c.kind == kind).count()
    }
}

fn random_point(n1: usize, rng: &mut ChaCha8Rng) -> HVector {
    (0..n1)
        .map(|_| {
            Quaternion::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect()
}

fn point_in(w: &ProjectiveSubspace, rng: &mut ChaCha8Rng) -> HVector {
    let mut v = vec![Quaternion::zero(); w.ambient_len()];
    for b in w.basis() {
        let c = random_point(1, rng)[0];
        for (x, y) in v.iter_mut().zip(b) {
            *x = *x + *y * c;
        }
    }
    v
}

fn compare_subspaces(name: &str, crushed: &ProjectiveSubspace, claimed: &ProjectiveSubspace) -> Check {
    let dist = if crushed.rank() == claimed.rank() { subspace_dist(crushed, claimed).unwrap_or(1.0) } else { 1.0 };
    Check {
        name: name.to_string(),
        kind: CheckKind::Complement,
        passed: dist < SUBSPACE_TOL,
        value: Some(dist),
        detail: format!(
            "crushed projective dim {}, reported {}",
            crushed.proj_dim(),
            claimed.proj_dim()
        ),
        probe: None,
        point: None,
    }
}

fn probe_check(name: String, expected: ProbeVerdict, outcome: ProbeOutcome, point: HVector) -> Check {
    Check {
        passed: outcome.verdict == expected,
        value: outcome.sup_separation.last().copied(),
        detail: format!("expected {expected:?}, observed {:?}", outcome.verdict),
        name,
        kind: CheckKind::Probe,
        probe: Some(outcome),
        point: Some(point),
    }
}

/// Number of random probe points placed off the complement.
pub const OFF_COMPLEMENT_PROBES: usize = 5;

/// Cross-checks a report against the oracle: reconstruction of the Jordan
/// model, crushed subspaces against the reported complement, and probes at
/// one point inside each complement subspace and at random points away
/// from it.
pub fn verify_region(gamma: &HMatrix, report: &EqRegionReport, cfg: &ProbeConfig) -> Result<VerificationSummary> {
    cfg.validate()?;
    let n1 = gamma.ensure_square()?;
    let jd = &report.jordan;
    let model = jd.jordan_matrix();
    if model.rows() != n1 {
        return Err(Error::DimensionMismatch { expected: n1, found: model.rows() });
    }
    let s = &jd.s;
    let mut checks = Vec::new();

    let residual = jd.residual(gamma)?;
    let bound = RECONSTRUCTION_TOL * gamma.max_norm().max(1.0);
    checks.push(Check {
        name: "jordan_reconstruction".into(),
        kind: CheckKind::Reconstruction,
        passed: residual <= bound,
        value: Some(residual),
        detail: format!("max |S γ S⁻¹ - J| against bound {bound:e}"),
        probe: None,
        point: None,
    });

    // Reported complement carried into Jordan coordinates.
    let claimed = report.original().iter().map(|w| w.transform(s)).collect::<Result<Vec<_>>>()?;
    let forward = crushed_subspace(&model, Direction::Forward, cfg)?;
    let backward = crushed_subspace(&model, Direction::Backward, cfg)?;
    match claimed.as_slice() {
        [] => {
            let both_empty = forward.is_empty() && backward.is_empty();
            checks.push(Check {
                name: "crushed_subspaces_empty".into(),
                kind: CheckKind::Consistency,
                passed: both_empty,
                value: None,
                detail: format!(
                    "crushed projective dims forward {}, backward {}",
                    forward.proj_dim(),
                    backward.proj_dim()
                ),
                probe: None,
                point: None,
            });
        }
        [k] => {
            checks.push(compare_subspaces("complement_0_forward", &forward, k));
            checks.push(compare_subspaces("complement_0_backward", &backward, k));
        }
        [k_plus, k_minus] => {
            checks.push(compare_subspaces("complement_0_forward", &forward, k_plus));
            checks.push(compare_subspaces("complement_1_backward", &backward, k_minus));
        }
        more => {
            checks.push(Check {
                name: "complement_count".into(),
                kind: CheckKind::Consistency,
                passed: false,
                value: Some(more.len() as f64),
                detail: "a cyclic group has at most two complement subspaces".into(),
                probe: None,
                point: None,
            });
        }
    }

    let rungs = Rungs::new(&model, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for (i, w) in report.original().iter().enumerate() {
        if w.is_empty() {
            continue;
        }
        let x = point_in(w, &mut rng);
        let pj = ProjectivePoint::new(s.mul_vec(&x)?)?;
        let outcome = probe_with(&rungs, &pj, cfg, &mut rng)?;
        checks.push(probe_check(format!("probe_inside_complement_{i}"), ProbeVerdict::NotEquicontinuous, outcome, x));
    }
    let mut placed = 0;
    let mut attempts = 0;
    while placed < OFF_COMPLEMENT_PROBES && attempts < 200 {
        attempts += 1;
        let x = random_point(n1, &mut rng);
        let Ok(pj) = ProjectivePoint::new(s.mul_vec(&x)?) else { continue };
        let far = claimed
            .iter()
            .all(|w| w.distance_to_point(&pj).is_ok_and(|d| d > 2.0 * cfg.separation_threshold));
        if !far {
            continue;
        }
        let outcome = probe_with(&rungs, &pj, cfg, &mut rng)?;
        checks.push(probe_check(format!("probe_off_complement_{placed}"), ProbeVerdict::Equicontinuous, outcome, x));
        placed += 1;
    }

    Ok(VerificationSummary {
        passed: checks.iter().all(|c| c.passed),
        dyn_type: report.dyn_type,
        seed: cfg.seed,
        config: cfg.clone(),
        checks,
    })
}
