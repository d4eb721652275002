//! Ball intersections inside subspaces and the subspace properties built
//! on them.
//!
//! ```
//! use centerlab::balls::{balls_intersect, BallFamily, Intersection};
//! use centerlab::norm::{Ball, NormSpec, Subspace, Vector};
//!
//! let space = NormSpec::linf(2);
//! let family = BallFamily::new(vec![
//!     Ball::new(Vector::from([-1.0, 0.0]), 1.0).unwrap(),
//!     Ball::new(Vector::from([1.0, 0.0]), 1.0).unwrap(),
//! ])
//! .unwrap();
//! let axis = Subspace::coordinate(2, &[1]).unwrap();
//! assert!(matches!(balls_intersect(&space, &family, &axis).unwrap(), Intersection::Feasible { .. }));
//! ```

mod decompose;
mod lifts;
mod projection;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use decompose::{decompose_min_sum, gamma_estimate, DecompositionResult, GammaEstimate};
pub use lifts::{
    ck_lift_projection, compose_direct_sum_projections, esum_dominator, locally_constrained_verify, projection_dominator,
    central_transfer_pipeline, CkLift, ComponentData, ComposedProjections, EsumDominator, LocalVerdict, LocallyConstrainedData,
    PipelineOutcome,
};
pub use projection::{
    almost_constrained_probe, verify_norm1_projection, AlmostConstrained, FullProjection, NetConfig, ProjectionData,
    ProjectionVerdict, VerifyMode,
};

use crate::linalg;
use crate::norm::{add_epigraph, Ball, NormSpec, Subspace, Vector};
use crate::opt::{
    lp_solve, subgradient_minimize, AffineExpr, FarkasCheck, LinearProgram, LpBuilder, LpStatus, Multipliers, SolvePath,
    SubgradientConfig,
};
use crate::{Error, Result, FEAS_TOL};

/// A nonempty list of closed balls in a common space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Ball>", into = "Vec<Ball>")]
pub struct BallFamily {
    balls: Vec<Ball>,
}

impl BallFamily {
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        let n = balls.first().ok_or_else(|| Error::InvalidArgument("ball family must be nonempty".into()))?.center.dim();
        for b in &balls {
            if b.center.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: b.center.dim() });
            }
            Ball::new(b.center.clone(), b.radius)?;
        }
        Ok(BallFamily { balls })
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn dim(&self) -> usize {
        self.balls[0].center.dim()
    }

    /// Same centers, every radius increased by `eps`.
    pub fn inflated(&self, eps: f64) -> BallFamily {
        BallFamily { balls: self.balls.iter().map(|b| Ball { center: b.center.clone(), radius: b.radius + eps }).collect() }
    }

    /// `max_i (‖w − a_i‖ − r_i)`; nonpositive iff `w` lies in every ball.
    pub fn gap(&self, space: &NormSpec, w: &[f64]) -> f64 {
        self.balls.iter().map(|b| space.dist(w, b.center.coords()) - b.radius).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl TryFrom<Vec<Ball>> for BallFamily {
    type Error = Error;

    fn try_from(balls: Vec<Ball>) -> Result<Self> {
        BallFamily::new(balls)
    }
}

impl From<BallFamily> for Vec<Ball> {
    fn from(f: BallFamily) -> Self {
        f.balls
    }
}

/// Outcome of [`balls_intersect`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Intersection {
    /// `witness` lies in `V` and in every ball up to `max_excess`.
    Feasible { witness: Vector, max_excess: f64, path: SolvePath },
    /// Farkas multipliers for the LP `lp` (coordinates of `V`, then one
    /// epigraph block per ball).
    Infeasible { certificate: Multipliers, check: FarkasCheck, lp: LinearProgram },
    /// Non-polyhedral norms only: the best point found still misses some
    /// ball by `best_gap > 0`. Not a proof of emptiness.
    NotFound { best_gap: f64, best_point: Vector },
}

impl Intersection {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Intersection::Feasible { .. })
    }

    pub fn witness(&self) -> Option<&Vector> {
        match self {
            Intersection::Feasible { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

fn check_dims(space: &NormSpec, family: &BallFamily, v: &Subspace) -> Result<()> {
    let n = space.dim();
    for d in [family.dim(), v.ambient_dim()] {
        if d != n {
            return Err(Error::DimensionMismatch { expected: n, found: d });
        }
    }
    Ok(())
}

/// Is `V ∩ ⋂ B(a_i, r_i)` nonempty?
pub fn balls_intersect(space: &NormSpec, family: &BallFamily, v: &Subspace) -> Result<Intersection> {
    check_dims(space, family, v)?;
    if space.is_polyhedral() {
        intersect_lp(space, family, v)
    } else {
        intersect_subgradient(space, family, v)
    }
}

fn intersect_lp(space: &NormSpec, family: &BallFamily, v: &Subspace) -> Result<Intersection> {
    let mut b = LpBuilder::new();
    let coords = b.add_vars(v.dim());
    for ball in family.balls() {
        let offset: Vec<f64> = ball.center.coords().iter().map(|c| -c).collect();
        let diff = v.affine_point(&coords, &offset);
        let t = add_epigraph(space, &mut b, &diff).expect("polyhedral");
        b.le(&AffineExpr::var(t), &AffineExpr::constant(ball.radius));
    }
    let lp = b.build();
    let out = lp_solve(&lp)?;
    match out.status {
        LpStatus::Optimal => {
            let u = out.point.expect("optimal point");
            let c: Vec<f64> = coords.iter().map(|&k| u[k]).collect();
            let witness = v.point(&c);
            let max_excess = family.gap(space, witness.coords()).max(0.0);
            Ok(Intersection::Feasible { witness, max_excess, path: SolvePath::Lp })
        }
        LpStatus::Infeasible => {
            let certificate = out.farkas().cloned().ok_or_else(|| Error::LpBreakdown("infeasible without certificate".into()))?;
            let check = certificate.check_farkas(&lp);
            if !check.valid {
                return Err(Error::LpBreakdown(format!("Farkas certificate does not verify: {check:?}")));
            }
            Ok(Intersection::Infeasible { certificate, check, lp })
        }
        LpStatus::Unbounded => Err(Error::LpBreakdown("feasibility LP reported unbounded".into())),
    }
}

fn intersect_subgradient(space: &NormSpec, family: &BallFamily, v: &Subspace) -> Result<Intersection> {
    let centers: Vec<Vec<f64>> = family.balls().iter().map(|b| b.center.coords().to_vec()).collect();
    let mut mean = vec![0.0; space.dim()];
    for c in &centers {
        linalg::axpy(1.0 / centers.len() as f64, c, &mut mean);
    }
    let start = v.coords_of(&mean);
    let scale = family.balls().iter().map(|b| b.radius + linalg::norm2(&linalg::sub(b.center.coords(), &mean))).fold(1e-3, f64::max);
    let objective = |c: &[f64]| {
        let w = v.point(c);
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, b) in family.balls().iter().enumerate() {
            let g = space.dist(w.coords(), b.center.coords()) - b.radius;
            if g > best.0 {
                best = (g, i);
            }
        }
        let d = linalg::sub(w.coords(), &centers[best.1]);
        (best.0, v.coords_of(&space.subgradient(&d)))
    };
    let out = subgradient_minimize(objective, |_| {}, &start, &SubgradientConfig::default().with_scale(scale));
    let point = v.point(&out.point);
    let gap = family.gap(space, point.coords());
    if gap <= FEAS_TOL {
        Ok(Intersection::Feasible { witness: point, max_excess: gap.max(0.0), path: SolvePath::Subgradient })
    } else {
        Ok(Intersection::NotFound { best_gap: gap, best_point: point })
    }
}

/// Uniform coordinates in `[-scale, scale]` mapped into `sub`.
pub(crate) fn random_in(rng: &mut ChaCha8Rng, sub: &Subspace, scale: f64) -> Vector {
    let c: Vec<f64> = (0..sub.dim()).map(|_| rng.gen_range(-scale..=scale)).collect();
    sub.point(&c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralConfig {
    pub trials: usize,
    pub seed: u64,
    /// Families tested before the random ones, in order.
    #[serde(default)]
    pub injected: Vec<BallFamily>,
}

impl Default for CentralConfig {
    fn default() -> Self {
        CentralConfig { trials: 200, seed: 0, injected: Vec::new() }
    }
}

/// Where a failing family came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum FamilySource {
    Injected(usize),
    Random(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SamplerVerdict {
    Pass { trials: usize, seed: u64, label: String },
    Fail { source: FamilySource, family: BallFamily, outcome: Intersection },
}

impl SamplerVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, SamplerVerdict::Pass { .. })
    }

    fn pass(trials: usize, seed: u64) -> Self {
        SamplerVerdict::Pass { trials, seed, label: format!("no counterexample found in {trials} trials") }
    }
}

/// Sampled test of centrality of `y` inside `ambient` (the whole space when
/// `None`): families with centers in `y` that meet in `ambient` must meet in
/// `y`.
///
/// Random families are built witness-first: a witness `w ∈ ambient` and 2–4
/// centers `a_i ∈ y`, with `r_i = ‖w − a_i‖(1 + u_i)`, `u_i ∈ [0, 0.2]`.
pub fn central_subspace_check(space: &NormSpec, y: &Subspace, ambient: Option<&Subspace>, cfg: &CentralConfig) -> Result<SamplerVerdict> {
    let whole = Subspace::whole(space.dim());
    let ambient = ambient.unwrap_or(&whole);
    if !y.is_subspace_of(ambient, 1e-9) {
        return Err(Error::Precondition("tested subspace is not contained in the ambient subspace".into()));
    }
    for (i, family) in cfg.injected.iter().enumerate() {
        if !family.balls().iter().all(|b| y.contains(&b.center, 1e-9)) {
            return Err(Error::Precondition(format!("injected family {i} has a center outside the subspace")));
        }
        if !balls_intersect(space, family, ambient)?.is_feasible() {
            log::info!("injected family {i} does not meet in the ambient space; skipped");
            continue;
        }
        let outcome = balls_intersect(space, family, y)?;
        if !outcome.is_feasible() {
            return Ok(SamplerVerdict::Fail { source: FamilySource::Injected(i), family: family.clone(), outcome });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for trial in 0..cfg.trials {
        let w = random_in(&mut rng, ambient, 2.0);
        let k = rng.gen_range(2..=4);
        let balls = (0..k)
            .map(|_| {
                let a = random_in(&mut rng, y, 2.0);
                let r = space.dist(w.coords(), a.coords()) * (1.0 + rng.gen_range(0.0..=0.2));
                Ball { center: a, radius: r }
            })
            .collect();
        let family = BallFamily { balls };
        let outcome = balls_intersect(space, &family, y)?;
        if !outcome.is_feasible() {
            return Ok(SamplerVerdict::Fail { source: FamilySource::Random(trial), family, outcome });
        }
    }
    Ok(SamplerVerdict::pass(cfg.trials, cfg.seed))
}

/// A point `y ∈ Y` with `‖y − a‖ ≤ ‖x − a‖` for every `a ∈ A`, if any.
///
/// This is [`balls_intersect`] on the balls `B(a, ‖x − a‖)`; for
/// non-polyhedral norms a `NotFound` answer is only a failure to find one.
pub fn ac_dominator(space: &NormSpec, y: &Subspace, a: &[Vector], x: &Vector) -> Result<Intersection> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("A must be nonempty".into()));
    }
    if let Some(i) = a.iter().position(|p| !y.contains(p, 1e-9)) {
        return Err(Error::Precondition(format!("point {i} of A is not in the subspace")));
    }
    let family = dominator_family(space, a, x)?;
    balls_intersect(space, &family, y)
}

pub(crate) fn dominator_family(space: &NormSpec, a: &[Vector], x: &Vector) -> Result<BallFamily> {
    BallFamily::new(a.iter().map(|p| Ball { center: p.clone(), radius: space.dist(x.coords(), p.coords()) }).collect())
}

/// For a norm-one projection `p` onto `Y` and a witness
/// `x0` of a family with centers in `Y`, `p(x0)` lies in every ball.
pub fn projection_keeps_witness(space: &NormSpec, p: &FullProjection, family: &BallFamily, x0: &Vector) -> bool {
    let px = p.apply(x0);
    family.gap(space, px.coords()) <= FEAS_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MidealConfig {
    pub trials: usize,
    pub epsilon: f64,
    pub seed: u64,
    #[serde(default)]
    pub injected: Vec<BallFamily>,
}

impl Default for MidealConfig {
    fn default() -> Self {
        MidealConfig { trials: 500, epsilon: 1e-6, seed: 0, injected: Vec::new() }
    }
}

/// Sampled 3-ball test: three balls that meet in the space and each meet
/// `z` must, after inflating every radius by `ε`, meet inside `z`.
///
/// Centers and witnesses are drawn from the half-integer grid in `[-2, 2]ⁿ`;
/// radii are `max(‖w − a_i‖, d(a_i, z))(1 + u_i)` with `u_i = 0` half of the
/// time and uniform in `[0, 0.2]` otherwise.
pub fn mideal_3ball_sampler(space: &NormSpec, z: &Subspace, cfg: &MidealConfig) -> Result<SamplerVerdict> {
    if !(cfg.epsilon > 0.0) {
        return Err(Error::InvalidArgument("ε must be > 0".into()));
    }
    for (i, family) in cfg.injected.iter().enumerate() {
        if let Some(outcome) = three_ball_failure(space, z, family, cfg.epsilon)? {
            return Ok(SamplerVerdict::Fail { source: FamilySource::Injected(i), family: family.clone(), outcome });
        }
    }
    let n = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = |rng: &mut ChaCha8Rng| -> Vector {
        Vector::new((0..n).map(|_| rng.gen_range(-4..=4) as f64 / 2.0).collect()).expect("finite")
    };
    for trial in 0..cfg.trials {
        let w = grid(&mut rng);
        let mut balls = Vec::with_capacity(3);
        for _ in 0..3 {
            let a = grid(&mut rng);
            let to_z = crate::norm::dist_to_subspace(space, &a, z)?.distance;
            let u = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..=0.2) };
            balls.push(Ball { radius: space.dist(w.coords(), a.coords()).max(to_z) * (1.0 + u), center: a });
        }
        let family = BallFamily { balls };
        if let Some(outcome) = three_ball_failure(space, z, &family, cfg.epsilon)? {
            return Ok(SamplerVerdict::Fail { source: FamilySource::Random(trial), family, outcome });
        }
    }
    Ok(SamplerVerdict::pass(cfg.trials, cfg.seed))
}

/// `Some(outcome)` when the hypotheses hold but the ε-inflated balls miss `z`.
fn three_ball_failure(space: &NormSpec, z: &Subspace, family: &BallFamily, eps: f64) -> Result<Option<Intersection>> {
    let whole = Subspace::whole(space.dim());
    if !balls_intersect(space, family, &whole)?.is_feasible() {
        return Ok(None);
    }
    for ball in family.balls() {
        let single = BallFamily { balls: vec![ball.clone()] };
        if !balls_intersect(space, &single, z)?.is_feasible() {
            return Ok(None);
        }
    }
    let outcome = balls_intersect(space, &family.inflated(eps), z)?;
    Ok((!outcome.is_feasible()).then_some(outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::{make_direct_sum, LinearFunctional, MonotonePolyhedralNorm};

    fn v3(c: [f64; 3]) -> Vector {
        Vector::from(c)
    }

    fn plane_family() -> BallFamily {
        BallFamily::new(
            [[-2.0, 1.0, 1.0], [1.0, 1.0, -2.0], [1.0, -2.0, 1.0]]
                .into_iter()
                .map(|c| Ball::new(v3(c), 1.5).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn y1_plus_y2() -> Subspace {
        Subspace::from_kernel(3, &[LinearFunctional(vec![1.0, 1.0, 1.0])]).unwrap()
    }

    #[test]
    fn plane_family_meets_in_space_but_not_in_plane() {
        let space = NormSpec::linf(3);
        let whole = balls_intersect(&space, &plane_family(), &Subspace::whole(3)).unwrap();
        let w = whole.witness().unwrap();
        assert!(plane_family().gap(&space, w.coords()) <= 1e-9);
        match balls_intersect(&space, &plane_family(), &y1_plus_y2()).unwrap() {
            Intersection::Infeasible { check, .. } => assert!(check.valid && check.gap < -1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_ball_is_feasible_at_its_center_region() {
        let space = NormSpec::l1(3);
        let family = BallFamily::new(vec![Ball::new(v3([1.0, 2.0, 3.0]), 0.0).unwrap()]).unwrap();
        let w = balls_intersect(&space, &family, &Subspace::whole(3)).unwrap();
        let w = w.witness().unwrap();
        assert!(space.dist(w.coords(), &[1.0, 2.0, 3.0]) < 1e-9);
    }

    #[test]
    fn euclidean_path_is_semi_decided() {
        let space = NormSpec::l2(2);
        let family = BallFamily::new(vec![
            Ball::new(Vector::from([-1.0, 0.0]), 1.2).unwrap(),
            Ball::new(Vector::from([1.0, 0.0]), 1.2).unwrap(),
        ])
        .unwrap();
        assert!(balls_intersect(&space, &family, &Subspace::whole(2)).unwrap().is_feasible());
        let far = BallFamily::new(vec![
            Ball::new(Vector::from([-1.0, 0.0]), 0.5).unwrap(),
            Ball::new(Vector::from([1.0, 0.0]), 0.5).unwrap(),
        ])
        .unwrap();
        match balls_intersect(&space, &far, &Subspace::whole(2)).unwrap() {
            Intersection::NotFound { best_gap, .. } => assert!(best_gap > 0.4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn central_checks() {
        let space = NormSpec::linf(3);
        let y1 = Subspace::from_basis(3, &[v3([1.0, 0.0, -1.0])]).unwrap();
        let cfg = CentralConfig { trials: 50, ..Default::default() };
        assert!(central_subspace_check(&space, &y1, None, &cfg).unwrap().passed());
        assert!(central_subspace_check(&space, &Subspace::whole(3), None, &cfg).unwrap().passed());
        let inj = CentralConfig { trials: 0, injected: vec![plane_family()], ..Default::default() };
        match central_subspace_check(&space, &y1_plus_y2(), None, &inj).unwrap() {
            SamplerVerdict::Fail { source, family, .. } => {
                assert_eq!(source, FamilySource::Injected(0));
                assert_eq!(family, plane_family());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dominators() {
        let space = NormSpec::linf(3);
        let a: Vec<Vector> = plane_family().balls().iter().map(|b| b.center.clone()).collect();
        let x = v3([-0.5, -0.5, -0.5]);
        assert!(matches!(ac_dominator(&space, &y1_plus_y2(), &a, &x).unwrap(), Intersection::Infeasible { .. }));
        let single = ac_dominator(&space, &y1_plus_y2(), &a[..1], &x).unwrap();
        assert!(single.is_feasible());
    }

    #[test]
    fn three_ball_property_on_two_dimensional_sums() {
        let axis = Subspace::coordinate(2, &[0]).unwrap();
        let cfg = MidealConfig { trials: 100, ..Default::default() };
        let max_sum = make_direct_sum(vec![NormSpec::l1(1), NormSpec::l1(1)], MonotonePolyhedralNorm::max(2)).unwrap();
        assert!(mideal_3ball_sampler(&max_sum, &axis, &cfg).unwrap().passed());
        let l1_sum = make_direct_sum(vec![NormSpec::l1(1), NormSpec::l1(1)], MonotonePolyhedralNorm::sum(2)).unwrap();
        let known = BallFamily::new(
            [[1.0, 1.0], [-1.0, 1.0], [0.0, 1.0]].into_iter().map(|c| Ball::new(Vector::from(c), 1.0).unwrap()).collect(),
        )
        .unwrap();
        let inj = MidealConfig { trials: 0, injected: vec![known], ..Default::default() };
        assert!(!mideal_3ball_sampler(&l1_sum, &axis, &inj).unwrap().passed());
    }
}
