//! Locally constrained pairs, their sums, and ℓ∞-lifts of projections.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{balls_intersect, central_subspace_check, random_in, BallFamily, CentralConfig, Intersection, SamplerVerdict};
use super::{verify_norm1_projection, FullProjection, ProjectionData, ProjectionVerdict, VerifyMode};
use crate::norm::{make_direct_sum, MonotonePolyhedralNorm, NormSpec, Subspace, Vector};
use crate::{Error, Result, FEAS_TOL};

/// `z ∈ Z₁`, `Z₂ ⊆ Y`, and the images `Pz ∈ Z₂`, `Qz ∈ Y` of projections
/// `P: span{z, Z₂} → Z₂`, `Q: span{z, Y} → Y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocallyConstrainedData {
    pub z: Vector,
    pub z2: Subspace,
    pub y: Subspace,
    pub p_image: Vector,
    pub q_image: Vector,
}

impl LocallyConstrainedData {
    /// Both maps are restrictions of `proj`, so `Y = range(proj)`,
    /// `Z₂ = Z₁ ∩ Y` and `Pz = Qz = proj(z)`.
    pub fn from_full_projection(proj: &FullProjection, z: Vector, z1: &Subspace) -> Result<Self> {
        if !z1.contains(&z, 1e-9) {
            return Err(Error::Precondition("z is not in Z₁".into()));
        }
        if !proj.maps_into(z1, 1e-9) {
            return Err(Error::Precondition("projection does not map Z₁ into itself".into()));
        }
        let y = proj.range();
        let z2 = z1.intersection(&y)?;
        let image = proj.apply(&z);
        Ok(LocallyConstrainedData { z, z2, y, p_image: image.clone(), q_image: image })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LocalVerdict {
    Accept,
    Reject { reason: String, witness: Option<Vector> },
}

impl LocalVerdict {
    pub fn accepted(&self) -> bool {
        matches!(self, LocalVerdict::Accept)
    }

    fn reject(reason: impl Into<String>) -> Self {
        LocalVerdict::Reject { reason: reason.into(), witness: None }
    }
}

/// Check the locally constrained condition at one `z`.
///
/// `Pz = Qz` is compared bit for bit. When `z` already lies in `Z₂`
/// (resp. `Y`) the only admissible map fixes `z`.
pub fn locally_constrained_verify(space: &NormSpec, data: &LocallyConstrainedData, mode: VerifyMode) -> Result<LocalVerdict> {
    let n = space.dim();
    for d in [data.z.dim(), data.p_image.dim(), data.q_image.dim(), data.y.ambient_dim(), data.z2.ambient_dim()] {
        if d != n {
            return Err(Error::DimensionMismatch { expected: n, found: d });
        }
    }
    if !data.z2.is_subspace_of(&data.y, 1e-9) {
        return Err(Error::Precondition("Z₂ is not contained in Y".into()));
    }
    if data.p_image.coords() != data.q_image.coords() {
        return Ok(LocalVerdict::reject("Pz and Qz differ"));
    }
    if !data.z2.contains(&data.p_image, 1e-9) {
        return Ok(LocalVerdict::reject("Pz is not in Z₂"));
    }
    if !data.y.contains(&data.q_image, 1e-9) {
        return Ok(LocalVerdict::reject("Qz is not in Y"));
    }
    let fixes = |img: &Vector| img.sub(&data.z).coords().iter().all(|d| d.abs() <= 1e-9);
    if data.y.contains(&data.z, 1e-9) {
        return Ok(if fixes(&data.q_image) {
            LocalVerdict::Accept
        } else {
            LocalVerdict::reject("z lies in Y, so Q must fix it")
        });
    }
    let checks = [
        ("P", &data.z2, &data.p_image),
        ("Q", &data.y, &data.q_image),
    ];
    for (name, sub, image) in checks {
        let pd = ProjectionData::new(sub.clone(), data.z.clone(), image.clone())?;
        if let ProjectionVerdict::Reject { y, excess, .. } = verify_norm1_projection(space, &pd, mode)? {
            return Ok(LocalVerdict::Reject { reason: format!("{name} has norm above one (excess {excess:e})"), witness: Some(y) });
        }
    }
    Ok(LocalVerdict::Accept)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutcome {
    /// A point of `Z₁` in every ball.
    pub z: Vector,
    /// `Pz`, a point of `Z₂` in every ball.
    pub image: Vector,
    pub max_excess: f64,
}

/// Transfer a family with centers in `Z₂ = Z₁ ∩ Y` meeting in `Y` to a
/// common point in `Z₂`: find `z ∈ Z₁` in every ball, then map it with the
/// locally constrained data supplied by `data_for(z)`.
///
/// Each stage that cannot proceed returns `Error::Precondition` naming it.
pub fn central_transfer_pipeline<F>(
    space: &NormSpec,
    z1: &Subspace,
    y: &Subspace,
    family: &BallFamily,
    data_for: F,
    mode: VerifyMode,
) -> Result<PipelineOutcome>
where
    F: Fn(&Vector) -> Result<LocallyConstrainedData>,
{
    let z2 = z1.intersection(y)?;
    if let Some(i) = family.balls().iter().position(|b| !z2.contains(&b.center, 1e-9)) {
        return Err(Error::Precondition(format!("centers: ball {i} is not centred in Z₂")));
    }
    if !balls_intersect(space, family, y)?.is_feasible() {
        return Err(Error::Precondition("meet in Y: the balls have no common point in Y".into()));
    }
    let z = match balls_intersect(space, family, z1)? {
        Intersection::Feasible { witness, .. } => witness,
        _ => return Err(Error::Precondition("meet in Z₁: no common point in Z₁, so Z₁ is not central here".into())),
    };
    let data = data_for(&z)?;
    if data.z != z {
        return Err(Error::Precondition("projection data: built for a different z".into()));
    }
    if !z2.is_subspace_of(&data.z2, 1e-9) || !data.z2.is_subspace_of(&z2, 1e-9) {
        return Err(Error::Precondition("projection data: Z₂ does not match Z₁ ∩ Y".into()));
    }
    if let LocalVerdict::Reject { reason, .. } = locally_constrained_verify(space, &data, mode)? {
        return Err(Error::Precondition(format!("locally constrained: {reason}")));
    }
    let image = data.p_image;
    let max_excess = family.gap(space, image.coords());
    if max_excess > FEAS_TOL * (1.0 + family.balls().iter().map(|b| b.radius).fold(0.0, f64::max)) {
        return Err(Error::Optimization(format!("image misses a ball by {max_excess:e}")));
    }
    Ok(PipelineOutcome { z, image, max_excess })
}

/// Locally constrained data for one summand.
pub type ComponentData = LocallyConstrainedData;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComposedProjections {
    pub p: ProjectionData,
    pub q: ProjectionData,
    /// `Pz₀ = Qz₀` bit for bit.
    pub images_equal: bool,
    pub max_ratio_p: f64,
    pub max_ratio_q: f64,
    pub samples: usize,
    pub seed: u64,
}

impl ComposedProjections {
    pub fn ok(&self) -> bool {
        self.images_equal && self.max_ratio_p <= 1.0 + FEAS_TOL && self.max_ratio_q <= 1.0 + FEAS_TOL
    }
}

/// Componentwise composition `P(αz₀ + w) = (αP_i z₀(i) + w(i))_i` on a
/// direct sum, checked by sampling `‖P(αz₀ + w)‖ ≤ ‖αz₀ + w‖`.
pub fn compose_direct_sum_projections(
    space: &NormSpec,
    components: &[ComponentData],
    z0: &Vector,
    samples: usize,
    seed: u64,
) -> Result<ComposedProjections> {
    let comps = space.components().ok_or_else(|| Error::InvalidArgument("not a sum space".into()))?;
    if comps.len() != components.len() {
        return Err(Error::DimensionMismatch { expected: comps.len(), found: components.len() });
    }
    if z0.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: z0.dim() });
    }
    let blocks: Vec<Range<usize>> = space.blocks();
    for (i, (c, r)) in components.iter().zip(&blocks).enumerate() {
        if c.z != z0.block(r.clone()) {
            return Err(Error::InvalidArgument(format!("component {i}: z does not match the block of z₀")));
        }
        if c.p_image.coords() != c.q_image.coords() {
            return Err(Error::InvalidArgument(format!("component {i}: P_i z₀ and Q_i z₀ differ")));
        }
        if let LocalVerdict::Reject { reason, .. } = locally_constrained_verify(&comps[i], c, VerifyMode::Exact)? {
            return Err(Error::Precondition(format!("component {i}: {reason}")));
        }
    }
    let z2 = Subspace::direct_sum(&components.iter().map(|c| c.z2.clone()).collect::<Vec<_>>());
    let y = Subspace::direct_sum(&components.iter().map(|c| c.y.clone()).collect::<Vec<_>>());
    let p_img = Vector::concat(&components.iter().map(|c| c.p_image.clone()).collect::<Vec<_>>());
    let q_img = Vector::concat(&components.iter().map(|c| c.q_image.clone()).collect::<Vec<_>>());
    let images_equal = p_img.coords() == q_img.coords();
    let p = ProjectionData { subspace: z2, x: z0.clone(), p: p_img };
    let q = ProjectionData { subspace: y, x: z0.clone(), p: q_img };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 2.0 * (1.0 + space.norm(z0.coords()));
    let mut ratio = |pd: &ProjectionData| {
        let mut best = 0.0_f64;
        for _ in 0..samples {
            let alpha: f64 = rng.gen_range(-2.0..=2.0);
            let w = random_in(&mut rng, &pd.subspace, scale);
            let den = space.norm(pd.x.scale(alpha).add(&w).coords());
            if den > 1e-12 {
                best = best.max(space.norm(pd.apply(alpha, &w).coords()) / den);
            }
        }
        best
    };
    let max_ratio_p = ratio(&p);
    let max_ratio_q = ratio(&q);
    Ok(ComposedProjections { p, q, images_equal, max_ratio_p, max_ratio_q, samples, seed })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsumDominator {
    pub y: Vector,
    /// `‖y(n)‖ / ‖x(n)‖` per component, 0 where `x(n) = 0`.
    pub component_ratios: Vec<f64>,
    /// `(‖y − a_i‖, ‖x − a_i‖)` per point.
    pub domination: Vec<(f64, f64)>,
    pub ok: bool,
}

/// Assemble a dominator on an E-sum from per-component dominators.
///
/// `oracle(n, x(n), A_n)` must return `y_n ∈ Y_n` with
/// `‖y_n − a‖ ≤ ‖x(n) − a‖` for `a ∈ A_n = {a_i(n)} ∪ {0}`; the zero point
/// keeps `‖y_n‖ ≤ ‖x(n)‖`, which monotonicity of the outer norm needs.
pub fn esum_dominator<F>(space: &NormSpec, mut oracle: F, x: &Vector, a: &[Vector]) -> Result<EsumDominator>
where
    F: FnMut(usize, &Vector, &[Vector]) -> Result<Vector>,
{
    space.components().ok_or_else(|| Error::InvalidArgument("not a sum space".into()))?;
    let comps = space.components().expect("checked");
    let n = space.dim();
    for v in a.iter().chain(std::iter::once(x)) {
        if v.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
        }
    }
    let mut parts = Vec::new();
    let mut component_ratios = Vec::new();
    for (i, r) in space.blocks().into_iter().enumerate() {
        let xn = x.block(r.clone());
        let mut an: Vec<Vector> = a.iter().map(|p| p.block(r.clone())).collect();
        an.push(Vector::zeros(r.len()));
        let yn = oracle(i, &xn, &an)?;
        if yn.dim() != r.len() {
            return Err(Error::DimensionMismatch { expected: r.len(), found: yn.dim() });
        }
        let nx = comps[i].norm(xn.coords());
        component_ratios.push(if nx > 0.0 { comps[i].norm(yn.coords()) / nx } else { 0.0 });
        parts.push(yn);
    }
    let y = Vector::concat(&parts);
    let domination: Vec<(f64, f64)> =
        a.iter().map(|p| (space.dist(y.coords(), p.coords()), space.dist(x.coords(), p.coords()))).collect();
    let close = |lhs: f64, rhs: f64| lhs <= rhs * (1.0 + FEAS_TOL) + 1e-12;
    let ok = domination.iter().all(|&(l, r)| close(l, r))
        && parts
            .iter()
            .zip(comps)
            .zip(space.blocks())
            .all(|((yn, c), r)| close(c.norm(yn.coords()), c.norm(x.block(r).coords())));
    Ok(EsumDominator { y, component_ratios, domination, ok })
}

/// An oracle for [`esum_dominator`] that applies a fixed norm-one
/// projection per component; it ignores the points.
pub fn projection_dominator(projections: Vec<FullProjection>) -> impl FnMut(usize, &Vector, &[Vector]) -> Result<Vector> {
    move |i, x, _| {
        let p = projections.get(i).ok_or_else(|| Error::InvalidArgument(format!("no projection for component {i}")))?;
        if p.dim() != x.dim() {
            return Err(Error::DimensionMismatch { expected: p.dim(), found: x.dim() });
        }
        Ok(p.apply(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CkLift {
    pub k: usize,
    pub space: NormSpec,
    pub lift: FullProjection,
    /// `(I ⊗ P)² = I ⊗ P` with no tolerance.
    pub idempotent_exact: bool,
    pub idempotence_residual: f64,
    pub sampled_norm: f64,
    pub maps_z1_into_z1: bool,
    /// Centrality of `Z₁ ⊗ ℝᵏ` in the lifted space.
    pub central_z1: SamplerVerdict,
    /// Centrality of `Z₂ ⊗ ℝᵏ` inside `Y ⊗ ℝᵏ`.
    pub central_z2: SamplerVerdict,
}

impl CkLift {
    pub fn ok(&self) -> bool {
        self.idempotent_exact
            && self.sampled_norm <= 1.0 + FEAS_TOL
            && self.maps_z1_into_z1
            && self.central_z1.passed()
            && self.central_z2.passed()
    }
}

/// Lift a norm-one projection `P` with `P(Z₁) ⊆ Z₁` to the ℓ∞-sum of `k`
/// copies of `base`. Hypothesis failures are reported as
/// `Error::Precondition` listing each failing clause.
pub fn ck_lift_projection(
    base: &NormSpec,
    proj: &FullProjection,
    z1: &Subspace,
    k: usize,
    cfg: &CentralConfig,
) -> Result<CkLift> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if proj.dim() != base.dim() || z1.ambient_dim() != base.dim() {
        return Err(Error::DimensionMismatch { expected: base.dim(), found: proj.dim() });
    }
    let mut violated = Vec::new();
    let residual = proj.idempotence_residual();
    if residual > 1e-12 {
        violated.push(format!("idempotent: residual {residual:e}"));
    }
    let norm = proj.sampled_norm(base, 2000, cfg.seed);
    if norm > 1.0 + FEAS_TOL {
        violated.push(format!("norm one: sampled norm {norm}"));
    }
    if !proj.maps_into(z1, 1e-9) {
        violated.push("P(Z₁) ⊆ Z₁".to_string());
    }
    if !violated.is_empty() {
        return Err(Error::Precondition(violated.join("; ")));
    }
    let space = make_direct_sum(vec![base.clone(); k], MonotonePolyhedralNorm::max(k))?;
    let lift = FullProjection::block_diagonal(&vec![proj.clone(); k]);
    let y = proj.range();
    let z2 = z1.intersection(&y)?;
    let y_lift = Subspace::direct_sum(&vec![y; k]);
    let z1_lift = Subspace::direct_sum(&vec![z1.clone(); k]);
    let z2_lift = Subspace::direct_sum(&vec![z2; k]);
    let central_z1 = central_subspace_check(&space, &z1_lift, None, cfg)?;
    let central_z2 = central_subspace_check(&space, &z2_lift, Some(&y_lift), cfg)?;
    Ok(CkLift {
        k,
        idempotent_exact: lift.is_idempotent_exact(),
        idempotence_residual: lift.idempotence_residual(),
        sampled_norm: lift.sampled_norm(&space, 2000, cfg.seed),
        maps_z1_into_z1: lift.maps_into(&z1_lift, 1e-9),
        central_z1,
        central_z2,
        space,
        lift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::Ball;

    fn l_inf_setup() -> (NormSpec, FullProjection, Subspace) {
        // P(a, b, c) = (a, b, 0) on ℓ∞³; Z₁ = span{e₁, e₃}.
        (NormSpec::linf(3), FullProjection::coordinate(3, &[0, 1]), Subspace::coordinate(3, &[0, 2]).unwrap())
    }

    #[test]
    fn restriction_of_full_projection_is_locally_constrained() {
        let (space, p, z1) = l_inf_setup();
        let data = LocallyConstrainedData::from_full_projection(&p, Vector::from([1.0, 0.0, 2.0]), &z1).unwrap();
        assert_eq!(data.z2.dim(), 1);
        assert!(locally_constrained_verify(&space, &data, VerifyMode::Exact).unwrap().accepted());
    }

    #[test]
    fn unequal_images_are_rejected() {
        let (space, p, z1) = l_inf_setup();
        let mut data = LocallyConstrainedData::from_full_projection(&p, Vector::from([1.0, 0.0, 2.0]), &z1).unwrap();
        data.q_image = data.q_image.add(&Vector::from([0.0, 1e-300, 0.0]));
        assert!(!locally_constrained_verify(&space, &data, VerifyMode::Exact).unwrap().accepted());
    }

    #[test]
    fn pipeline_moves_witness_into_z2() {
        let (space, p, z1) = l_inf_setup();
        let family = BallFamily::new(vec![
            Ball { center: Vector::from([-1.0, 0.0, 0.0]), radius: 1.5 },
            Ball { center: Vector::from([1.0, 0.0, 0.0]), radius: 1.5 },
        ])
        .unwrap();
        let y = p.range();
        let out = central_transfer_pipeline(
            &space,
            &z1,
            &y,
            &family,
            |z| LocallyConstrainedData::from_full_projection(&p, z.clone(), &z1),
            VerifyMode::Exact,
        )
        .unwrap();
        assert!(out.max_excess <= 1e-9);
        assert_eq!(out.image.coords()[2], 0.0);
    }

    #[test]
    fn composition_on_a_sum() {
        let (_, p, z1) = l_inf_setup();
        let space = make_direct_sum(vec![NormSpec::linf(3), NormSpec::linf(3)], MonotonePolyhedralNorm::sum(2)).unwrap();
        let z0 = Vector::from([1.0, 0.0, 2.0, 0.0, 0.0, -1.0]);
        let comps: Vec<ComponentData> = space
            .blocks()
            .into_iter()
            .map(|r| LocallyConstrainedData::from_full_projection(&p, z0.block(r), &z1).unwrap())
            .collect();
        let c = compose_direct_sum_projections(&space, &comps, &z0, 2000, 5).unwrap();
        assert!(c.ok(), "{c:?}");
    }

    #[test]
    fn esum_dominator_from_projections() {
        let space = make_direct_sum(vec![NormSpec::linf(2), NormSpec::linf(2)], MonotonePolyhedralNorm::sum(2)).unwrap();
        let p = FullProjection::coordinate(2, &[0]);
        let x = Vector::from([1.0, 3.0, -2.0, 0.5]);
        let a = vec![Vector::from([0.5, 0.0, 1.0, 0.0])];
        let out = esum_dominator(&space, projection_dominator(vec![p.clone(), p]), &x, &a).unwrap();
        assert!(out.ok, "{out:?}");
        assert_eq!(out.y, Vector::from([1.0, 0.0, -2.0, 0.0]));
    }

    #[test]
    fn ck_lift_is_exact_and_k1_is_identity() {
        let (space, p, z1) = l_inf_setup();
        let cfg = CentralConfig { trials: 20, ..Default::default() };
        let one = ck_lift_projection(&space, &p, &z1, 1, &cfg).unwrap();
        assert_eq!(one.lift, p);
        let three = ck_lift_projection(&space, &p, &z1, 3, &cfg).unwrap();
        assert!(three.ok(), "{three:?}");
        let bad = FullProjection::coordinate(3, &[0]).compose(&FullProjection::new(vec![
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap());
        match ck_lift_projection(&space, &bad, &z1, 2, &cfg) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("norm one")),
            other => panic!("{other:?}"),
        }
    }
}
