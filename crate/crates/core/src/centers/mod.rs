//! Restricted f-centers of finite sets.
//!
//! For a norm on `ℝⁿ`, a feasible set `V`, points `F = {x_1, …, x_N}` and a
//! scalarisation `f`, the f-radius of `v` is
//! `r_f(v, F) = f(‖v − x_1‖, …, ‖v − x_N‖)`. [`solve_center`] minimises it
//! over `V`; the probes in [`probe`] and [`sacp`] look at near-minimisers.
//!
//! ```
//! use centerlab::centers::{solve_center, CenterProblem, FcmcFunction, FeasibleSet, FiniteSet};
//! use centerlab::norm::{NormSpec, Vector};
//!
//! let problem = CenterProblem {
//!     space: NormSpec::l1(2),
//!     feasible: FeasibleSet::Whole,
//!     points: FiniteSet::new(vec![Vector::from([0.0, 0.0]), Vector::from([2.0, 2.0])]).unwrap(),
//!     f: FcmcFunction::max(2),
//! };
//! let result = solve_center(&problem).unwrap();
//! assert!((result.rad - 2.0).abs() < 1e-9);
//! ```

mod fcmc;
pub mod probe;
pub mod sacp;

use serde::{Deserialize, Serialize};

pub use fcmc::{CompositePart, FcmcFunction, FcmcReport};
pub use probe::{delta_center_probe, modulus_csv, p1_modulus, DeltaCenterProbe, ModulusPoint, SamplerConfig};
pub use sacp::{sacp_experiment, Cluster, ClusterOutcome, SacpVerdict};

use crate::linalg;
use crate::norm::{add_epigraph, NormSpec, Subspace, Vector};
use crate::opt::{lp_solve, subgradient_minimize, AffineExpr, LpBuilder, LpOutcome, SolvePath, SubgradientConfig};
use crate::{Error, Result};

/// Samples used for the recorded spot check of `f`.
const F_CHECK_SAMPLES: usize = 200;
const F_CHECK_SEED: u64 = 0x5eed;

/// A nonempty finite point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vector>", into = "Vec<Vector>")]
pub struct FiniteSet {
    points: Vec<Vector>,
}

impl FiniteSet {
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        let n = points.first().ok_or_else(|| Error::InvalidArgument("finite set must be nonempty".into()))?.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
        }
        Ok(FiniteSet { points })
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Coordinatewise mean.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        for p in &self.points {
            linalg::axpy(1.0 / self.len() as f64, p.coords(), &mut c);
        }
        c
    }
}

impl TryFrom<Vec<Vector>> for FiniteSet {
    type Error = Error;

    fn try_from(points: Vec<Vector>) -> Result<Self> {
        FiniteSet::new(points)
    }
}

impl From<FiniteSet> for Vec<Vector> {
    fn from(s: FiniteSet) -> Self {
        s.points
    }
}

/// `offset + directions`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub offset: Vector,
    pub directions: Subspace,
}

impl AffinePiece {
    pub fn point(&self, c: &[f64]) -> Vec<f64> {
        let mut v = self.directions.point(c).into_inner();
        linalg::axpy(1.0, self.offset.coords(), &mut v);
        v
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        self.directions.contains(&v.sub(&self.offset), tol)
    }
}

/// Where the center may live.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeasibleSet {
    #[default]
    Whole,
    Subspace { subspace: Subspace },
    /// A finite union of affine subspaces, e.g. a union of parallel lines.
    Union { pieces: Vec<AffinePiece> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterProblem {
    pub space: NormSpec,
    #[serde(default)]
    pub feasible: FeasibleSet,
    pub points: FiniteSet,
    pub f: FcmcFunction,
}

impl CenterProblem {
    /// Dimension and arity checks plus the structural check of `f`.
    pub fn check(&self) -> Result<()> {
        let n = self.space.dim();
        if self.points.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.points.dim() });
        }
        self.f.check()?;
        if self.f.arity() != self.points.len() {
            return Err(Error::DimensionMismatch { expected: self.points.len(), found: self.f.arity() });
        }
        for piece in self.pieces() {
            if piece.offset.dim() != n || piece.directions.ambient_dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: piece.offset.dim() });
            }
        }
        if self.pieces().is_empty() {
            return Err(Error::InvalidArgument("feasible union has no pieces".into()));
        }
        Ok(())
    }

    /// The feasible set as a list of affine pieces.
    pub fn pieces(&self) -> Vec<AffinePiece> {
        let n = self.space.dim();
        match &self.feasible {
            FeasibleSet::Whole => vec![AffinePiece { offset: Vector::zeros(n), directions: Subspace::whole(n) }],
            FeasibleSet::Subspace { subspace } => {
                vec![AffinePiece { offset: Vector::zeros(n), directions: subspace.clone() }]
            }
            FeasibleSet::Union { pieces } => pieces.clone(),
        }
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        self.pieces().iter().any(|p| p.contains(v, tol))
    }

    /// `(‖v − x_1‖, …, ‖v − x_N‖)`.
    pub fn distances(&self, v: &[f64]) -> Vec<f64> {
        self.points.points().iter().map(|x| self.space.dist(v, x.coords())).collect()
    }

    /// `r_f(v, F)` without dimension checks.
    pub fn rf(&self, v: &[f64]) -> f64 {
        self.f.eval(&self.distances(v))
    }

    /// Value and a subgradient of `r_f(·, F)` at `v`.
    fn rf_subgradient(&self, v: &[f64]) -> (f64, Vec<f64>) {
        let t = self.distances(v);
        let s = self.f.subgradient(&t);
        let mut g = vec![0.0; v.len()];
        for (x, si) in self.points.points().iter().zip(s) {
            if si != 0.0 {
                let d = linalg::sub(v, x.coords());
                linalg::axpy(si, &self.space.subgradient(&d), &mut g);
            }
        }
        (self.f.eval(&t), g)
    }

    /// Whether the LP path applies.
    pub fn is_lp_solvable(&self) -> bool {
        self.space.is_polyhedral() && self.f.is_lp_representable()
    }
}

/// `r_f(v, F) = f(‖v − x_1‖, …, ‖v − x_N‖)`.
pub fn eval_rf(space: &NormSpec, v: &Vector, points: &FiniteSet, f: &FcmcFunction) -> Result<f64> {
    let n = space.dim();
    for x in std::iter::once(v).chain(points.points()) {
        if x.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.dim() });
        }
    }
    if f.arity() != points.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: f.arity() });
    }
    let t: Vec<f64> = points.points().iter().map(|x| space.dist(v.coords(), x.coords())).collect();
    Ok(f.eval(&t))
}

/// The LP for one affine piece: coordinates `c`, distance epigraphs and an
/// objective expression equal to `f` at the optimum.
#[derive(Clone, Debug)]
pub(crate) struct CenterLp {
    pub builder: LpBuilder,
    pub coords: Vec<usize>,
    pub objective: AffineExpr,
}

impl CenterLp {
    pub fn new(problem: &CenterProblem, piece: &AffinePiece) -> Option<CenterLp> {
        let mut builder = LpBuilder::new();
        let coords = builder.add_vars(piece.directions.dim());
        let mut t = Vec::with_capacity(problem.points.len());
        for x in problem.points.points() {
            let offset = linalg::sub(piece.offset.coords(), x.coords());
            let diff = piece.directions.affine_point(&coords, &offset);
            t.push(add_epigraph(&problem.space, &mut builder, &diff)?);
        }
        let objective = problem.f.add_objective(&mut builder, &t)?;
        builder.set_objective(&objective);
        Some(CenterLp { builder, coords, objective })
    }

    /// Restrict to `objective ≤ level`.
    pub fn with_level(&self, level: f64) -> LpBuilder {
        let mut b = self.builder.clone();
        b.le(&self.objective, &AffineExpr::constant(level));
        b
    }

    fn coords_from(&self, u: &[f64]) -> Vec<f64> {
        self.coords.iter().map(|&v| u[v]).collect()
    }
}

/// Slack added to `rad` when describing the optimal face.
pub fn face_slack(rad: f64) -> f64 {
    crate::FEAS_TOL * (1.0 + rad.abs())
}

/// The optimal set, described as `{v ∈ piece : r_f(v, F) ≤ level}` for the
/// listed pieces; `level` is `rad` plus [`face_slack`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentFace {
    pub pieces: Vec<usize>,
    pub level: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CenterCertificate {
    /// The LP solved on the winning piece.
    Lp { outcome: LpOutcome },
    /// Running best values, every `stride`-th iterate.
    Subgradient { iterations: usize, converged: bool, stride: usize, trace: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterResult {
    pub rad: f64,
    pub minimizer: Vector,
    /// Index of the affine piece holding the minimiser.
    pub piece: usize,
    pub path: SolvePath,
    pub face: Option<CentFace>,
    pub certificate: CenterCertificate,
    pub f_check: FcmcReport,
}

impl CenterResult {
    pub fn converged(&self) -> bool {
        match &self.certificate {
            CenterCertificate::Lp { .. } => true,
            CenterCertificate::Subgradient { converged, .. } => *converged,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathChoice {
    #[default]
    Auto,
    Lp,
    Subgradient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub path: PathChoice,
    /// Pick the lexicographically smallest LP minimiser (in the piece's
    /// basis coordinates) instead of whichever vertex the simplex returns.
    pub lexicographic: bool,
    pub subgradient: SubgradientConfig,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { path: PathChoice::Auto, lexicographic: true, subgradient: SubgradientConfig::default() }
    }
}

pub fn solve_center(problem: &CenterProblem) -> Result<CenterResult> {
    solve_center_with(problem, &SolveOptions::default())
}

pub fn solve_center_with(problem: &CenterProblem, opts: &SolveOptions) -> Result<CenterResult> {
    problem.check()?;
    let f_check = problem.f.sampled_check(F_CHECK_SAMPLES, F_CHECK_SEED);
    if !f_check.is_ok() {
        log::warn!("f failed sampled checks: {:?}", f_check.failures);
    }
    let use_lp = match opts.path {
        PathChoice::Auto => problem.is_lp_solvable(),
        PathChoice::Lp if !problem.is_lp_solvable() => {
            return Err(Error::InvalidArgument("problem has no LP formulation".into()));
        }
        PathChoice::Lp => true,
        PathChoice::Subgradient => false,
    };
    if use_lp {
        solve_lp(problem, opts.lexicographic, f_check)
    } else if let (PathChoice::Auto, Some(mid)) = (opts.path, feasible_midpoint(problem)) {
        // max(‖v − x₁‖, ‖v − x₂‖) ≥ ‖x₁ − x₂‖/2, with equality at the midpoint.
        let (piece, _) = problem.pieces().iter().enumerate().find(|(_, p)| p.contains(&mid, 0.0)).expect("checked");
        let rad = problem.rf(mid.coords());
        Ok(CenterResult {
            rad,
            minimizer: mid,
            piece,
            path: SolvePath::Exact,
            face: None,
            certificate: CenterCertificate::Subgradient { iterations: 0, converged: true, stride: 1, trace: vec![rad] },
            f_check,
        })
    } else {
        solve_subgradient(problem, &opts.subgradient, f_check)
    }
}

/// The midpoint of two points under an equally weighted max, when feasible.
fn feasible_midpoint(problem: &CenterProblem) -> Option<Vector> {
    let pts = problem.points.points();
    let equal = |w: &[f64]| w.len() == 2 && w[0] == w[1];
    let max_like = match &problem.f {
        FcmcFunction::WeightedMax { weights } | FcmcFunction::InverseWeightedMax { weights } => equal(weights),
        _ => false,
    };
    if pts.len() != 2 || !max_like {
        return None;
    }
    let mid = pts[0].add(&pts[1]).scale(0.5);
    problem.pieces().iter().any(|p| p.contains(&mid, 0.0)).then_some(mid)
}

fn solve_lp(problem: &CenterProblem, lexicographic: bool, f_check: FcmcReport) -> Result<CenterResult> {
    let pieces = problem.pieces();
    let mut solved = Vec::with_capacity(pieces.len());
    for piece in &pieces {
        let lp = CenterLp::new(problem, piece).expect("checked LP-solvable");
        let outcome = lp_solve(&lp.builder.build())?;
        let rad = outcome
            .value
            .filter(|_| outcome.is_optimal())
            .ok_or_else(|| Error::Optimization(format!("center LP ended {:?}", outcome.status)))?
            + lp.objective.constant;
        solved.push((lp, outcome, rad));
    }
    let rad = solved.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let level = rad + face_slack(rad);
    let face_pieces: Vec<usize> = (0..solved.len()).filter(|&i| solved[i].2 <= level).collect();
    let best = face_pieces[0];
    let (lp, outcome, _) = &solved[best];
    let mut coords = lp.coords_from(outcome.point.as_ref().expect("optimal"));
    if lexicographic {
        coords = lexicographic_min(lp, level, &coords)?;
    }
    let minimizer = Vector::new(pieces[best].point(&coords))?;
    Ok(CenterResult {
        rad,
        minimizer,
        piece: best,
        path: SolvePath::Lp,
        face: Some(CentFace { pieces: face_pieces, level }),
        certificate: CenterCertificate::Lp { outcome: outcome.clone() },
        f_check,
    })
}

/// Successively minimise `c_0, c_1, …` over the optimal face.
fn lexicographic_min(lp: &CenterLp, level: f64, start: &[f64]) -> Result<Vec<f64>> {
    let mut b = lp.with_level(level);
    let mut coords = start.to_vec();
    for k in 0..lp.coords.len() {
        let mut bk = b.clone();
        bk.set_objective(&AffineExpr::var(lp.coords[k]));
        let out = lp_solve(&bk.build())?;
        match (out.status, out.point) {
            (crate::opt::LpStatus::Optimal, Some(u)) => {
                coords = lp.coords_from(&u);
                let ck = coords[k];
                let slack = crate::FEAS_TOL * (1.0 + ck.abs());
                b.le(&AffineExpr::var(lp.coords[k]), &AffineExpr::constant(ck + slack));
            }
            // The face is bounded and nonempty; anything else is numerical.
            (status, _) => {
                log::debug!("lexicographic step {k} ended {status:?}; keeping the previous vertex");
                break;
            }
        }
    }
    Ok(coords)
}

fn solve_subgradient(problem: &CenterProblem, cfg: &SubgradientConfig, f_check: FcmcReport) -> Result<CenterResult> {
    let centroid = problem.points.centroid();
    let spread = problem
        .points
        .points()
        .iter()
        .map(|x| linalg::norm2(&linalg::sub(x.coords(), &centroid)))
        .fold(0.0, f64::max);
    let mut best: Option<(usize, Vec<f64>, f64, crate::opt::SubgradientOutcome)> = None;
    for (i, piece) in problem.pieces().iter().enumerate() {
        let dirs = &piece.directions;
        let start = dirs.coords_of(&linalg::sub(&centroid, piece.offset.coords()));
        let objective = |c: &[f64]| {
            let v = piece.point(c);
            let (val, g) = problem.rf_subgradient(&v);
            (val, dirs.coords_of(&g))
        };
        let scale = spread.max(linalg::norm2(&linalg::sub(&piece.point(&start), &centroid))).max(1e-3);
        let out = subgradient_minimize(objective, |_| {}, &start, &cfg.clone().with_scale(scale));
        if !out.value.is_finite() {
            return Err(Error::NonFinite);
        }
        if best.as_ref().is_none_or(|b| out.value < b.2) {
            best = Some((i, out.point.clone(), out.value, out));
        }
    }
    let (piece, coords, rad, out) = best.expect("at least one piece");
    if !out.converged {
        log::warn!("subgradient path stopped after {} iterations without converging", out.iterations);
    }
    let minimizer = Vector::new(problem.pieces()[piece].point(&coords))?;
    let stride = (out.trace.len() / 200).max(1);
    let trace: Vec<f64> = out.running_best().into_iter().step_by(stride).collect();
    Ok(CenterResult {
        rad,
        minimizer,
        piece,
        path: SolvePath::Subgradient,
        face: None,
        certificate: CenterCertificate::Subgradient { iterations: out.iterations, converged: out.converged, stride, trace },
        f_check,
    })
}

/// Distance from `x` to the center set: an LP over the optimal face when
/// one is known, otherwise the distance to the minimiser.
pub fn distance_to_cent(problem: &CenterProblem, result: &CenterResult, x: &[f64]) -> Result<f64> {
    let Some(face) = &result.face else {
        return Ok(problem.space.dist(x, result.minimizer.coords()));
    };
    let pieces = problem.pieces();
    let mut best = f64::INFINITY;
    for &i in &face.pieces {
        let piece = &pieces[i];
        let lp = CenterLp::new(problem, piece).ok_or_else(|| Error::InvalidArgument("face without LP".into()))?;
        let mut b = lp.with_level(face.level);
        let offset = linalg::sub(piece.offset.coords(), x);
        let diff = piece.directions.affine_point(&lp.coords, &offset);
        let t = add_epigraph(&problem.space, &mut b, &diff).expect("polyhedral");
        b.set_objective(&AffineExpr::var(t));
        let out = lp_solve(&b.build())?;
        let d = out.value.filter(|_| out.is_optimal()).ok_or_else(|| {
            Error::Optimization(format!("distance-to-face LP ended {:?}", out.status))
        })?;
        best = best.min(d.max(0.0));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v<const N: usize>(c: [f64; N]) -> Vector {
        Vector::from(c)
    }

    fn plane_points() -> FiniteSet {
        FiniteSet::new(vec![v([-2.0, 1.0, 1.0]), v([1.0, 1.0, -2.0]), v([1.0, -2.0, 1.0])]).unwrap()
    }

    #[test]
    fn rf_at_known_witness() {
        let r = eval_rf(&NormSpec::linf(3), &v([-0.5, -0.5, -0.5]), &plane_points(), &FcmcFunction::max(3)).unwrap();
        assert_eq!(r, 1.5);
    }

    #[test]
    fn two_points_give_half_distance() {
        for space in [NormSpec::linf(2), NormSpec::l1(2), NormSpec::l2(2)] {
            let problem = CenterProblem {
                space: space.clone(),
                feasible: FeasibleSet::Whole,
                points: FiniteSet::new(vec![v([0.0, 1.0]), v([3.0, -1.0])]).unwrap(),
                f: FcmcFunction::max(2),
            };
            let r = solve_center(&problem).unwrap();
            let half = space.norm(&[3.0, -2.0]) / 2.0;
            assert!((r.rad - half).abs() < 1e-6, "{space:?}: {} vs {half}", r.rad);
            assert!((problem.rf(&[1.5, 0.0]) - half).abs() < 1e-12);
        }
    }

    #[test]
    fn lexicographic_choice_on_a_segment() {
        // Cent is {(0, t) : |t| ≤ 1}; the smallest point is (0, -1).
        let problem = CenterProblem {
            space: NormSpec::linf(2),
            feasible: FeasibleSet::Whole,
            points: FiniteSet::new(vec![v([-1.0, 0.0]), v([1.0, 0.0])]).unwrap(),
            f: FcmcFunction::max(2),
        };
        let r = solve_center(&problem).unwrap();
        assert!((r.rad - 1.0).abs() < 1e-12);
        assert!(r.minimizer.coords()[0].abs() < 1e-9 && (r.minimizer.coords()[1] + 1.0).abs() < 1e-8);
        assert!(distance_to_cent(&problem, &r, &[0.0, 0.5]).unwrap() < 1e-9);
        assert!((distance_to_cent(&problem, &r, &[0.0, 3.0]).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn restricted_center_exceeds_whole_space_radius() {
        let y12 = Subspace::from_kernel(3, &[crate::norm::LinearFunctional(vec![1.0, 1.0, 1.0])]).unwrap();
        let mut problem =
            CenterProblem { space: NormSpec::linf(3), feasible: FeasibleSet::Whole, points: plane_points(), f: FcmcFunction::max(3) };
        let whole = solve_center(&problem).unwrap();
        assert!(whole.rad <= 1.5 + 1e-12);
        problem.feasible = FeasibleSet::Subspace { subspace: y12.clone() };
        let restricted = solve_center(&problem).unwrap();
        assert!(restricted.rad > 1.5 + 1e-6);
        assert!(y12.contains(&restricted.minimizer, 1e-9));
        let sub = solve_center_with(&problem, &SolveOptions { path: PathChoice::Subgradient, ..Default::default() }).unwrap();
        assert!((sub.rad - restricted.rad).abs() < 1e-4, "{} vs {}", sub.rad, restricted.rad);
    }

    #[test]
    fn union_of_lines() {
        // Lines e_n + span{e_1} in ℓ₁⁴; F = {0}.
        let n = 4;
        let u = Subspace::coordinate(n, &[0]).unwrap();
        let pieces = (1..n).map(|k| AffinePiece { offset: Vector::unit(n, k), directions: u.clone() }).collect();
        let problem = CenterProblem {
            space: NormSpec::l1(n),
            feasible: FeasibleSet::Union { pieces },
            points: FiniteSet::new(vec![Vector::zeros(n)]).unwrap(),
            f: FcmcFunction::max(1),
        };
        let r = solve_center(&problem).unwrap();
        assert!((r.rad - 1.0).abs() < 1e-12);
        assert_eq!(r.face.as_ref().unwrap().pieces, vec![0, 1, 2]);
        assert!(problem.contains(&Vector::unit(n, 2), 1e-12));
        assert!(!problem.contains(&Vector::unit(n, 0), 1e-12));
    }

    #[test]
    fn weighted_sum_and_power_sum_paths() {
        let pts = FiniteSet::new(vec![v([0.0, 0.0]), v([4.0, 0.0]), v([0.0, 3.0])]).unwrap();
        let lp_problem = CenterProblem {
            space: NormSpec::l1(2),
            feasible: FeasibleSet::Whole,
            points: pts.clone(),
            f: FcmcFunction::WeightedSum { weights: vec![1.0, 2.0, 1.0] },
        };
        let a = solve_center(&lp_problem).unwrap();
        let b = solve_center_with(&lp_problem, &SolveOptions { path: PathChoice::Subgradient, ..Default::default() }).unwrap();
        assert_eq!(a.path, SolvePath::Lp);
        assert!((a.rad - b.rad).abs() < 1e-4);
        let smooth = CenterProblem { f: FcmcFunction::PowerSum { p: 2.0, weights: vec![1.0; 3] }, ..lp_problem };
        let c = solve_center(&smooth).unwrap();
        assert_eq!(c.path, SolvePath::Subgradient);
        assert!(c.rad <= smooth.rf(&smooth.points.centroid()) + 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let problem =
            CenterProblem { space: NormSpec::linf(3), feasible: FeasibleSet::Whole, points: plane_points(), f: FcmcFunction::max(3) };
        let s = serde_json::to_string(&problem).unwrap();
        let back: CenterProblem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, problem);
    }
}
