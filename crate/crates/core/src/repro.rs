//! Scripted runs behind the command-line tool: built-in reproductions,
//! center reports and subspace property checks.
//!
//! Built-in instances are JSON documents compiled into the crate so they
//! can be printed, edited and fed back.
//!
//! ```
//! use centerlab::repro::{run_repro, RunConfig};
//!
//! let report = run_repro("ex2.4", &RunConfig { trials: Some(20), ..Default::default() }).unwrap();
//! assert!(report.passed);
//! ```

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::balls::{
    almost_constrained_probe, balls_intersect, central_subspace_check, central_transfer_pipeline, ck_lift_projection,
    compose_direct_sum_projections, decompose_min_sum, esum_dominator, mideal_3ball_sampler, projection_dominator,
    ac_dominator, AlmostConstrained, BallFamily, CentralConfig, ComponentData, FullProjection, Intersection,
    LocallyConstrainedData, MidealConfig, NetConfig, SamplerVerdict, VerifyMode,
};
use crate::centers::{
    delta_center_probe, modulus_csv, p1_modulus, sacp_experiment, solve_center, solve_center_with, CenterProblem,
    ClusterOutcome, FcmcFunction, FeasibleSet, FiniteSet, PathChoice, SamplerConfig, SolveOptions,
};
use crate::norm::{
    dist_to_subspace, make_direct_sum, make_esum, sum_subspaces, ENorm, MonotonePolyhedralNorm, NormSpec, Subspace, Vector,
};
use crate::report::{Check, Oracle, Report, SCHEMA};
use crate::sequences::{c0_constrained_criterion, c0_hyperplane_gc, line_union_model, seq_norms, truncate_kernel, GeometricTailSeq};
use crate::{Error, Result, FEAS_TOL};

pub const NAMES: [&str; 9] = ["ex2.1", "ex2.4", "ex3.7", "thm2.5", "thm2.7", "thm2.8", "thm2.11", "cor2.13", "thm3.1"];

const FINITE_NOTE: &str =
    "the source statement concerns infinite-dimensional spaces; this run checks a finite-dimensional substitute";

/// The embedded JSON instance for a reproduction name.
pub fn builtin_instance(name: &str) -> Option<&'static str> {
    Some(match name {
        "ex2.1" => include_str!("../instances/ex2.1.json"),
        "ex2.4" => include_str!("../instances/ex2.4.json"),
        "ex3.7" => include_str!("../instances/ex3.7.json"),
        "thm2.5" => include_str!("../instances/thm2.5.json"),
        "thm2.7" => include_str!("../instances/thm2.7.json"),
        "thm2.8" => include_str!("../instances/thm2.8.json"),
        "thm2.11" => include_str!("../instances/thm2.11.json"),
        "cor2.13" => include_str!("../instances/cor2.13.json"),
        "thm3.1" => include_str!("../instances/thm3.1.json"),
        _ => return None,
    })
}

/// Overrides shared by every run; `None` keeps the instance default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub trials: Option<usize>,
}

fn check_schema(schema: u32) -> Result<()> {
    if schema != SCHEMA {
        return Err(Error::InvalidArgument(format!("unsupported schema {schema}, expected {SCHEMA}")));
    }
    Ok(())
}

fn parse<T: for<'de> Deserialize<'de>>(json: &str) -> Result<T> {
    Ok(serde_json::from_str(json)?)
}

/// Run a named reproduction on its built-in instance, or on `instance` when
/// given.
pub fn run_repro_with(name: &str, instance: Option<&str>, cfg: &RunConfig) -> Result<Report> {
    let json = match instance {
        Some(s) => s,
        None => builtin_instance(name).ok_or_else(|| Error::InvalidArgument(format!("unknown reproduction {name:?}")))?,
    };
    let started = Instant::now();
    let mut report = Report::new(["repro", name], cfg);
    let instance_seed = serde_json::from_str::<serde_json::Value>(json)?.get("seed").and_then(serde_json::Value::as_u64);
    report.attach("seed", &cfg.seed.or(instance_seed))?;
    match name {
        "ex2.1" => ex21(parse(json)?, &mut report)?,
        "ex2.4" => ex24(parse(json)?, cfg, &mut report)?,
        "ex3.7" => ex37(parse(json)?, cfg, &mut report)?,
        "thm2.5" => transfer(parse(json)?, cfg, &mut report)?,
        "thm2.7" => composition(parse(json)?, cfg, &mut report)?,
        "thm2.8" => esum_assembly(parse(json)?, cfg, &mut report)?,
        "thm2.11" => three_ball(parse(json)?, cfg, &mut report)?,
        "cor2.13" => lift(parse(json)?, cfg, &mut report)?,
        "thm3.1" => decomposition(parse(json)?, cfg, &mut report)?,
        other => return Err(Error::InvalidArgument(format!("unknown reproduction {other:?}"))),
    }
    report.finish(started);
    Ok(report)
}

pub fn run_repro(name: &str, cfg: &RunConfig) -> Result<Report> {
    run_repro_with(name, None, cfg)
}

#[derive(Deserialize)]
struct Ex24 {
    schema: u32,
    space: NormSpec,
    points: Vec<Vector>,
    witness: Vector,
    radius: f64,
    y1: Subspace,
    y2: Subspace,
    trials: usize,
    seed: u64,
}

fn family_of(space: &NormSpec, points: &[Vector], radius: f64) -> Result<BallFamily> {
    let _ = space;
    BallFamily::new(points.iter().map(|p| crate::norm::Ball { center: p.clone(), radius }).collect())
}

fn certificate_verifies(outcome: &Intersection) -> bool {
    matches!(outcome, Intersection::Infeasible { check, .. } if check.valid)
}

fn ex24(inst: Ex24, cfg: &RunConfig, r: &mut Report) -> Result<()> {
    check_schema(inst.schema)?;
    let tol = cfg.tol.unwrap_or(1e-12);
    let space = &inst.space;
    for (i, p) in inst.points.iter().enumerate() {
        let d = space.dist(inst.witness.coords(), p.coords());
        r.check(Check::close(format!("norm x - y{}", i + 1), inst.radius, d, tol, Oracle::Reference));
    }
    let family = family_of(space, &inst.points, inst.radius)?;
    let whole = Subspace::whole(space.dim());
    let in_space = balls_intersect(space, &family, &whole)?;
    let gap = in_space.witness().map_or(f64::INFINITY, |w| family.gap(space, w.coords()));
    r.check(Check::holds("balls meet in the space", in_space.is_feasible(), format!("witness gap {gap:e}"), Oracle::Reference));
    r.check(Check::at_most("witness lies in every ball", 0.0, gap, FEAS_TOL, Oracle::Identity));
    let plane = sum_subspaces(&inst.y1, &inst.y2)?;
    let in_plane = balls_intersect(space, &family, &plane)?;
    let desc = match &in_plane {
        Intersection::Infeasible { check, .. } => format!("infeasible; certificate gap {:e}", check.gap),
        other => format!("{other:?}"),
    };
    r.check(Check::holds("no common point in Y1 + Y2", certificate_verifies(&in_plane), desc, Oracle::Reference));
    r.attach("plane_outcome", &in_plane)?;

    let trials = cfg.trials.unwrap_or(inst.trials);
    let seed = cfg.seed.unwrap_or(inst.seed);
    let central = CentralConfig { trials, seed, injected: Vec::new() };
    for (name, y) in [("Y1", &inst.y1), ("Y2", &inst.y2)] {
        let v = central_subspace_check(space, y, None, &central)?;
        r.check(Check::holds(format!("{name} central ({trials} trials)"), v.passed(), label(&v), Oracle::Reference));
    }
    let injected = CentralConfig { trials: 0, seed, injected: vec![family.clone()] };
    let v = central_subspace_check(space, &plane, None, &injected)?;
    r.check(Check::holds("Y1 + Y2 not central (injected family)", !v.passed(), label(&v), Oracle::Reference));
    let v = central_subspace_check(space, &whole, None, &central)?;
    r.check(Check::holds("whole space central", v.passed(), label(&v), Oracle::Identity));

    let mut problem = CenterProblem {
        space: space.clone(),
        feasible: FeasibleSet::Whole,
        points: FiniteSet::new(inst.points.clone())?,
        f: FcmcFunction::max(inst.points.len()),
    };
    let rad_x = solve_center(&problem)?.rad;
    r.check(Check::close("Chebyshev radius in the space", inst.radius, rad_x, 1e-9, Oracle::derived("half diameter")));
    problem.feasible = FeasibleSet::Subspace { subspace: plane };
    let rad_plane = solve_center(&problem)?.rad;
    r.check(Check::at_least("restricted radius exceeds it", inst.radius + 1e-6, rad_plane, 0.0, Oracle::derived("lp")));
    Ok(())
}

fn label(v: &SamplerVerdict) -> String {
    match v {
        SamplerVerdict::Pass { label, .. } => label.clone(),
        SamplerVerdict::Fail { source, .. } => format!("counterexample from {source:?}"),
    }
}

#[derive(Deserialize)]
struct Ex21 {
    schema: u32,
    f: GeometricTailSeq,
    f1: GeometricTailSeq,
    f2: GeometricTailSeq,
    truncate: usize,
}

fn ex21(inst: Ex21, r: &mut Report) -> Result<()> {
    check_schema(inst.schema)?;
    let n = seq_norms(&inst.f);
    r.check(Check::equal("linf(f)", "1/2", &n.linf, Oracle::Reference));
    r.check(Check::equal("l1(f)", "2", &n.l1, Oracle::Reference));
    r.check(Check::equal("support of f finite", false, n.support_finite, Oracle::Reference));
    let gc = c0_hyperplane_gc(&inst.f)?;
    r.check(Check::holds("ker f fails (GC)", !gc.holds, gc.reason, Oracle::Reference));
    let two = num_rational::BigRational::from_integer(2.into());
    for (name, f, at) in [("f1", &inst.f1, 2), ("f2", &inst.f2, 1)] {
        r.check(Check::equal(format!("l1({name})"), "1", seq_norms(f).l1, Oracle::Reference));
        r.check(Check::equal(format!("2|{name}({at})|"), "1", f.coord(at).abs_ref() * &two, Oracle::Reference));
    }
    let c = c0_constrained_criterion(&[inst.f1.clone(), inst.f2.clone()])?;
    let chosen: Vec<Option<usize>> = c.attainments.iter().map(|a| a.chosen).collect();
    r.check(Check::holds("constrained criterion for ker f1 ∩ ker f2", c.holds, format!("{chosen:?}"), Oracle::Reference));
    r.check(Check::equal("attaining coordinates", "[Some(2), Some(1)]", format!("{chosen:?}"), Oracle::Reference));
    r.note(c.note.clone());
    let k = truncate_kernel(&[inst.f1, inst.f2], inst.truncate)?;
    r.check(Check::equal(
        format!("truncated kernel dimension at n = {}", inst.truncate),
        inst.truncate - 2,
        k.subspace.dim(),
        Oracle::derived("rank"),
    ));
    r.attach("truncation_tail_mass", &k.tail_mass.iter().map(|q| q.to_string()).collect::<Vec<_>>())?;
    Ok(())
}

trait AbsRef {
    fn abs_ref(&self) -> Self;
}

impl AbsRef for num_rational::BigRational {
    fn abs_ref(&self) -> Self {
        num_traits::Signed::abs(self)
    }
}

#[derive(Deserialize)]
struct Ex37 {
    schema: u32,
    n: usize,
    distance_checks: usize,
    horizon: usize,
    cluster_tol: f64,
}

fn ex37(inst: Ex37, cfg: &RunConfig, r: &mut Report) -> Result<()> {
    check_schema(inst.schema)?;
    let model = line_union_model(inst.n)?;
    let space = &model.space;
    for k in 1..=inst.distance_checks.min(inst.n - 1) {
        let span = Subspace::coordinate(inst.n, &(0..k).collect::<Vec<_>>())?;
        let d = dist_to_subspace(space, &Vector::unit(inst.n, k), &span)?.distance;
        r.check(Check::close(format!("d(e{}, span e1..e{k})", k + 1), 1.0, d, cfg.tol.unwrap_or(1e-9), Oracle::Reference));
    }
    let problem = CenterProblem {
        space: space.clone(),
        feasible: model.feasible(),
        points: FiniteSet::new(vec![Vector::zeros(inst.n)])?,
        f: FcmcFunction::max(1),
    };
    let rad = solve_center_with(&problem, &SolveOptions { lexicographic: false, ..Default::default() })?.rad;
    r.check(Check::close("d(0, U + V)", 1.0, rad, 1e-9, Oracle::Reference));
    let v = sacp_experiment(&problem, rad, model.unit_sequence(), inst.horizon, inst.cluster_tol, 1e-9)?;
    r.check(Check::holds("(e_n) is minimizing", v.minimizing, format!("last value {}", v.values[v.values.len() - 1]), Oracle::Reference));
    let all_one = v.values.iter().all(|&x| x == 1.0);
    r.check(Check::holds("every value equals 1", all_one, format!("{} values", v.values.len()), Oracle::Reference));
    match &v.outcome {
        ClusterOutcome::NoneWithinHorizon { min_pairwise_distance, .. } => {
            r.check(Check::close("min pairwise distance", 2.0, *min_pairwise_distance, 1e-12, Oracle::Reference));
            r.check(Check::holds("no cluster within horizon", true, "none_within_horizon", Oracle::Reference));
        }
        other => {
            r.check(Check::holds("no cluster within horizon", false, format!("{other:?}"), Oracle::Reference));
        }
    }
    r.note(v.topology.clone());
    r.note(FINITE_NOTE);
    Ok(())
}

#[derive(Deserialize)]
struct TransferInstance {
    schema: u32,
    space: NormSpec,
    projection: FullProjection,
    z1: Subspace,
    families: Vec<BallFamily>,
    trials: usize,
    seed: u64,
}

fn transfer(inst: TransferInstance, cfg: &RunConfig, r: &mut Report) -> Result<()> {
    check_schema(inst.schema)?;
    let y = inst.projection.range();
    let z2 = inst.z1.intersection(&y)?;
    let (space, p, z1) = (&inst.space, &inst.projection, &inst.z1);
    for (i, family) in inst.families.iter().enumerate() {
        let outcome =
            central_transfer_pipeline(space, z1, &y, family, |z| LocallyConstrainedData::from_full_projection(p, z.clone(), z1), VerifyMode::Exact);
        match outcome {
            Ok(o) => {
                r.check(Check::at_most(format!("family {i}: image in every ball"), 0.0, o.max_excess, FEAS_TOL, Oracle::Identity));
                r.check(Check::holds(format!("family {i}: image in Z2"), z2.contains(&o.image, 1e-9), format!("{:?}", o.image), Oracle::Identity));
            }
            Err(Error::Precondition(msg)) => {
                r.check(Check::holds(format!("family {i}: pipeline"), false, msg, Oracle::Identity));
            }
            Err(e) => return Err(e),
        }
    }
    let trials = cfg.trials.unwrap_or(inst.trials);
    let central = CentralConfig { trials, seed: cfg.seed.unwrap_or(inst.seed), injected: inst.families.clone() };
    let v = central_subspace_check(space, &z2, Some(&y), &central)?;
    r.check(Check::holds("Z2 central in Y (sampled)", v.passed(), label(&v), Oracle::derived("ball sampler")));
    Ok(())
}

/// A constructed direct sum with per-summand projection data at `z0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionCase {
    pub space: NormSpec,
    pub projections: Vec<FullProjection>,
    pub z1: Vec<Subspace>,
    pub z0: Vector,
    pub components: Vec<ComponentData>,
}

fn quarter(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> f64 {
    f64::from(rng.gen_range(lo..=hi)) / 4.0
}

/// One summand: a norm, a norm-one projection and an invariant `Z₁`.
fn summand(rng: &mut ChaCha8Rng) -> Result<(NormSpec, FullProjection, Subspace)> {
    let d = rng.gen_range(2..=3);
    let kind = rng.gen_range(0..3);
    let space = if kind == 1 { NormSpec::l1(d) } else { NormSpec::linf(d) };
    if kind < 2 {
        let keep: Vec<usize> = (0..d).filter(|_| rng.gen_bool(0.5)).collect();
        let mut t: Vec<usize> = (0..d).filter(|_| rng.gen_bool(0.6)).collect();
        if t.is_empty() {
            t.push(rng.gen_range(0..d));
        }
        return Ok((space, FullProjection::coordinate(d, &keep), Subspace::coordinate(d, &t)?));
    }
    // x ↦ x_j y with y_j = 1 and |y_k| ≤ 1 has norm one on ℓ∞.
    let j = rng.gen_range(0..d);
    let mut y: Vec<f64> = (0..d).map(|_| quarter(rng, -4, 4)).collect();
    y[j] = 1.0;
    let y = Vector::new(y)?;
    let p = FullProjection::rank_one(&y, Vector::unit(d, j).coords())?;
    let k = (j + 1) % d;
    Ok((space, p, Subspace::from_basis(d, &[y, Vector::unit(d, k)])?))
}

fn random_pi(rng: &mut ChaCha8Rng, k: usize) -> Result<MonotonePolyhedralNorm> {
    match rng.gen_range(0..3) {
        0 => Ok(MonotonePolyhedralNorm::max(k)),
        1 => Ok(MonotonePolyhedralNorm::sum(k)),
        _ => {
            let mut g: Vec<Vec<f64>> = (0..k).map(|i| Vector::unit(k, i).into_inner()).collect();
            g.push(vec![0.5; k]);
            MonotonePolyhedralNorm::new(g)
        }
    }
}

pub fn composition_cases(count: usize, seed: u64) -> Result<Vec<CompositionCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.gen_range(2..=4);
        let mut comps = Vec::new();
        let mut projections = Vec::new();
        let mut z1 = Vec::new();
        let mut blocks = Vec::new();
        for _ in 0..k {
            let (s, p, z) = summand(&mut rng)?;
            let c: Vec<f64> = (0..z.dim()).map(|_| quarter(&mut rng, -8, 8)).collect();
            blocks.push(z.point(&c));
            comps.push(s);
            projections.push(p);
            z1.push(z);
        }
        let space = make_direct_sum(comps, random_pi(&mut rng, k)?)?;
        let components = projections
            .iter()
            .zip(&z1)
            .zip(&blocks)
            .map(|((p, z), b)| LocallyConstrainedData::from_full_projection(p, b.clone(), z))
            .collect::<Result<Vec<_>>>()?;
        out.push(CompositionCase { space, projections, z1, z0: Vector::concat(&blocks), components });
    }
    Ok(out)
}

#[derive(Deserialize)]
struct CountInstance {
    schema: u32,
    instances: usize,
    #[serde(default)]
    samples: usize,
    #[serde(default)]
    points: usize,
    seed: u64,
}

fn composition(inst: CountInstance, cfg: &RunConfig, r: &mut Report) -> Result<()> {
    check_schema(inst.schema)?;
    let seed = cfg.seed.unwrap_or(inst.seed);
    let samples = cfg.trials.unwrap_or(inst.samples);
    let bound = cfg.tol.unwrap_or(FEAS_TOL);
    for (i, case) in composition_cases(inst.instances, seed)?.iter().enumerate() {
        let c = compose_direct_sum_projections(&case.space, &case.components, &case.z0, samples, seed.wrapping_add(i as u64))?;
        r.check(Check::holds(format!("case {i}: Pz0 = Qz0 bit-exact"), c.images_equal, format!("{:?}", c.q.p), Oracle::Identity));
        let worst = c.max_ratio_q.max(c.max_ratio_p);
        r.check(Check::at_most(format!("case {i}: sampled ratio ({samples} samples)"), 1.0, worst, bound, Oracle::derived("sampling")));
    }
    r.note(FINITE_NOTE);
    Ok(())
}

/// An E-sum with one norm-one projection per summand and points in `⊕ Y_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsumCase {
    pub space: NormSpec,
    pub projections: Vec<FullProjection>,
    pub subspaces: Vec<Subspace>,
    pub x: Vector,
    pub points: Vec<Vector>,
}

pub fn esum_cases(count: usize, points: usize, seed: u64) -> Result<Vec<EsumCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.gen_range(2..=4);
        let mut comps = Vec::new();
        let mut projections = Vec::new();
        for _ in 0..k {
            let d = rng.gen_range(2..=3);
            comps.push(if rng.gen_bool(0.5) { NormSpec::l1(d) } else { NormSpec::linf(d) });
            let mut keep: Vec<usize> = (0..d).filter(|_| rng.gen_bool(0.5)).collect();
            if keep.is_empty() {
                keep.push(0);
            }
            projections.push(FullProjection::coordinate(d, &keep));
        }
        let weights: Vec<f64> = (0..k).map(|_| quarter(&mut rng, 2, 8)).collect();
        let e_norm = match rng.gen_range(0..4) {
            0 => ENorm::Monotone(random_pi(&mut rng, k)?),
            1 => ENorm::WeightedLp { p: 2.0, weights },
            2 => ENorm::WeightedLp { p: 3.0, weights },
            _ => ENorm::WeightedLp { p: f64::INFINITY, weights },
        };
        let space = make_esum(comps, e_norm)?;
        let subspaces: Vec<Subspace> = projections.iter().map(FullProjection::range).collect();
        let y = Subspace::direct_sum(&subspaces);
        let n = space.dim();
        let x = Vector::new((0..n).map(|_| quarter(&mut rng, -8, 8)).collect())?;
        let pts = (0..points)
            .map(|_| {
                let c: Vec<f64> = (0..y.dim()).map(|_| quarter(&mut rng, -8, 8)).collect();
                y.point(&c)
            })
            .collect();
        out.push(EsumCase { space, projections, subspaces, x, points: pts });
    }
    Ok(out)
}

/// Per-summand dominators from the ball-intersection LP.
pub fn lp_component_oracle(case: &EsumCase) -> impl FnMut(usize, &Vector, &[Vector]) -> Result<Vector> + '_ {
    move |i, x, a| {
        let comp = &case.space.components().expect("sum space")[i];
        match ac_dominator(comp, &case.subspaces[i], a, x)? {
            Intersection::Feasible { witness, .. } => Ok(witness),
            _ => Err(Error::Optimization(format!("no dominator in summand {i}"))),
        }
    }
}

fn esum_assembly(inst: CountInstance, cfg: &RunConfig, r: &mut Report) -> Result<()> {
    check_schema(inst.schema)?;
    let seed = cfg.seed.unwrap_or(inst.seed);
    for (i, case) in esum_cases(inst.instances, inst.points.max(1), seed)?.iter().enumerate() {
        let lp = esum_dominator(&case.space, lp_component_oracle(case), &case.x, &case.points)?;
        let proj = esum_dominator(&case.space, projection_dominator(case.projections.clone()), &case.x, &case.points)?;
        let worst = lp.component_ratios.iter().copied().fold(0.0, f64::max);
        r.check(Check::holds(format!("case {i}: LP dominator"), lp.ok, format!("max component ratio {worst:.6}"), Oracle::Identity));
        r.check(Check::holds(format!("case {i}: projection dominator"), proj.ok, format!("{:?}", proj.y), Oracle::Identity));
    }
    r.note(FINITE_NOTE);
    Ok(())
}

#[derive(Deserialize)]
struct ThreeBall {
    schema: u32,
    trials: usize,
    epsilon: f64,
    seed: u64,
    witness: BallFamily,
}

fn three_ball(inst: ThreeBall, cfg: &RunConfig, r: &mut Report) -> Result<()> {
    check_schema(inst.schema)?;
    let axis = Subspace::coordinate(2, &[0])?;
    let line = || vec![NormSpec::l1(1), NormSpec::l1(1)];
    let max_sum = make_direct_sum(line(), MonotonePolyhedralNorm::max(2))?;
    let l1_sum = make_direct_sum(line(), MonotonePolyhedralNorm::sum(2))?;
    let epsilon = cfg.tol.unwrap_or(inst.epsilon);
    let trials = cfg.trials.unwrap_or(inst.trials);
    let seed = cfg.seed.unwrap_or(inst.seed);
    let pass = mideal_3ball_sampler(&max_sum, &axis, &MidealConfig { trials, epsilon, seed, injected: Vec::new() })?;
    r.check(Check::holds("summand of the max-sum passes", pass.passed(), label(&pass), Oracle::derived("3-ball sampler")));
    let fail = mideal_3ball_sampler(&l1_sum, &axis, &MidealConfig { trials: 0, epsilon, seed, injected: vec![inst.witness] })?;
    let verified = matches!(&fail, SamplerVerdict::Fail { outcome, .. } if certificate_verifies(outcome));
    r.check(Check::holds("summand of the sum fails with a certified triple", verified, label(&fail), Oracle::derived("3-ball sampler")));
    r.attach("witness", &fail)?;
    Ok(())
}

#[derive(Deserialize)]
struct LiftInstance {
    schema: u32,
    space: NormSpec,
    projection: FullProjection,
    z1: Subspace,
    k: Vec<usize>,
    trials: usize,
    seed: u64,
}

fn lift(inst: LiftInstance, cfg: &RunConfig, r: &mut Report) -> Result<()> {
    check_schema(inst.schema)?;
    let central = CentralConfig { trials: cfg.trials.unwrap_or(inst.trials), seed: cfg.seed.unwrap_or(inst.seed), injected: Vec::new() };
    for &k in &inst.k {
        let l = ck_lift_projection(&inst.space, &inst.projection, &inst.z1, k, &central)?;
        r.check(Check::holds(format!("k = {k}: lift idempotent (exact)"), l.idempotent_exact, format!("residual {:e}", l.idempotence_residual), Oracle::Identity));
        r.check(Check::at_most(format!("k = {k}: lift norm"), 1.0, l.sampled_norm, FEAS_TOL, Oracle::derived("sampling")));
        r.check(Check::holds(format!("k = {k}: lift maps Z1 into Z1"), l.maps_z1_into_z1, "", Oracle::Identity));
        let implication = !l.central_z1.passed() || l.central_z2.passed();
        let seen = format!("Z1: {}; Z2 in Y: {}", label(&l.central_z1), label(&l.central_z2));
        r.check(Check::holds(format!("k = {k}: Z1 central implies Z2 central in Y"), implication, seen, Oracle::derived("ball sampler")));
        if !l.central_z1.passed() {
            r.note(format!("k = {k}: hypothesis not met, implication holds vacuously"));
        }
        if k == 1 {
            r.check(Check::holds("k = 1: lift equals P", l.lift == inst.projection, "", Oracle::Identity));
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct DecompositionInstance {
    schema: u32,
    space: NormSpec,
    y: Subspace,
    z: Subspace,
    samples: usize,
    grid: usize,
    seed: u64,
}

/// `min_{w ∈ Y∩Z} ‖y0 + w‖ + ‖z0 − w‖` on a grid with two refinements.
fn grid_split(space: &NormSpec, y0: &Vector, z0: &Vector, common: &Subspace, steps: usize) -> f64 {
    let value = |c: &[f64]| {
        let w = common.point(c);
        space.norm(y0.add(&w).coords()) + space.norm(z0.sub(&w).coords())
    };
    let d = common.dim();
    if d == 0 {
        return value(&[]);
    }
    let mut center = vec![0.0; d];
    let mut half = 2.0 * (1.0 + crate::linalg::norm2(y0.coords()) + crate::linalg::norm2(z0.coords()));
    let mut best = value(&center);
    for _ in 0..3 {
        let h = 2.0 * half / steps as f64;
        let mut idx = vec![0usize; d];
        let mut arg = center.clone();
        loop {
            let c: Vec<f64> = idx.iter().zip(&center).map(|(&i, &m)| m - half + h * i as f64).collect();
            let v = value(&c);
            if v < best {
                best = v;
                arg = c;
            }
            let mut j = 0;
            while j < d && idx[j] == steps {
                idx[j] = 0;
                j += 1;
            }
            if j == d {
                break;
            }
            idx[j] += 1;
        }
        center = arg;
        half = 2.0 * h;
    }
    best
}

fn decomposition(inst: DecompositionInstance, cfg: &RunConfig, r: &mut Report) -> Result<()> {
    check_schema(inst.schema)?;
    let space = &inst.space;
    let seed = cfg.seed.unwrap_or(inst.seed);
    let samples = cfg.trials.unwrap_or(inst.samples);
    let sum = sum_subspaces(&inst.y, &inst.z)?;
    let common = inst.y.intersection(&inst.z)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut min_ratio, mut max_gap) = (f64::INFINITY, 0.0_f64);
    for _ in 0..samples {
        let c: Vec<f64> = (0..sum.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x = sum.point(&c);
        let d = decompose_min_sum(space, &x, &inst.y, &inst.z)?;
        min_ratio = min_ratio.min(d.ratio);
        if space.dim() <= 3 {
            let grid = grid_split(space, &d.y, &d.z, &common, inst.grid);
            max_gap = max_gap.max((grid - d.value).abs());
        }
    }
    r.check(Check::at_least(format!("gamma_x over {samples} samples"), 1.0, min_ratio, 1e-9, Oracle::Identity));
    if space.dim() <= 3 {
        r.check(Check::at_most("value vs grid brute force", 0.0, max_gap, cfg.tol.unwrap_or(1e-3), Oracle::derived("grid")));
    }
    for (name, sub) in [("Y", &inst.y), ("Z", &inst.z)] {
        let x = sub.point(&vec![1.0; sub.dim()]);
        let d = decompose_min_sum(space, &x, &inst.y, &inst.z)?;
        r.check(Check::close(format!("gamma_x = 1 for x in {name}"), 1.0, d.ratio, 1e-12, Oracle::Identity));
    }
    Ok(())
}

/// A center problem plus the δ values probed after solving it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterInstance {
    pub schema: u32,
    #[serde(flatten)]
    pub problem: CenterProblem,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
}

fn default_deltas() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3, 1e-4]
}

impl CenterInstance {
    pub fn from_json(s: &str) -> Result<Self> {
        let inst: CenterInstance = parse(s)?;
        check_schema(inst.schema)?;
        inst.problem.check()?;
        Ok(inst)
    }
}

/// Solve, compare paths, probe δ-centers and the (P₁) modulus.
pub fn center_report(inst: &CenterInstance, cfg: &RunConfig) -> Result<Report> {
    let started = Instant::now();
    let mut r = Report::new(["center"], cfg);
    r.attach("seed", &cfg.seed.unwrap_or(0))?;
    let problem = &inst.problem;
    let result = solve_center(problem)?;
    r.check(Check::holds("solver converged", result.converged(), format!("rad {} via {:?}", result.rad, result.path), Oracle::Identity));
    r.attach("rad", &result.rad)?;
    r.attach("minimizer", &result.minimizer)?;
    if problem.is_lp_solvable() {
        let sub = solve_center_with(problem, &SolveOptions { path: PathChoice::Subgradient, ..Default::default() })?;
        r.check(Check::close("subgradient path agrees", result.rad, sub.rad, cfg.tol.unwrap_or(1e-4), Oracle::derived("subgradient")));
    }
    if problem.pieces().len() == 1 {
        let sampler = SamplerConfig { seed: cfg.seed.unwrap_or(0), samples: cfg.trials.unwrap_or(200), ..Default::default() };
        let modulus = p1_modulus(problem, &result, &inst.deltas, &sampler)?;
        let monotone = modulus.windows(2).all(|w| w[1].excess <= w[0].excess);
        r.check(Check::holds("excess nonincreasing as delta decreases", monotone, format!("{} rows", modulus.len()), Oracle::Identity));
        r.attach("modulus_csv", &modulus_csv(&modulus))?;
        if let Some(&delta) = inst.deltas.last() {
            let probe = delta_center_probe(problem, &result, delta, 1e-2, &sampler)?;
            r.attach("delta_probe", &probe)?;
        }
    } else {
        r.note("δ-probes need a single affine piece; skipped for unions");
    }
    r.finish(started);
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyKind {
    Central,
    Ac,
    AlmostConstrained,
    Mideal,
}

impl std::str::FromStr for PropertyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidArgument(format!("unknown property {s:?}")))
    }
}

/// Input for a property check; fields not used by a kind are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyInstance {
    pub schema: u32,
    pub space: NormSpec,
    pub subspace: Subspace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<Subspace>,
    /// The transversal point for `ac` and `almost-constrained`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vector>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vector>,
    /// Families tried before random ones.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<BallFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl PropertyInstance {
    pub fn from_json(s: &str) -> Result<Self> {
        let inst: PropertyInstance = parse(s)?;
        check_schema(inst.schema)?;
        Ok(inst)
    }

    fn x(&self) -> Result<&Vector> {
        self.x.as_ref().ok_or_else(|| Error::InvalidArgument("this property needs \"x\"".into()))
    }
}

pub fn property_report(kind: PropertyKind, inst: &PropertyInstance, cfg: &RunConfig) -> Result<Report> {
    let started = Instant::now();
    let mut r = Report::new(["property".to_string(), serde_json::to_value(kind)?.as_str().unwrap_or("").to_string()], cfg);
    r.attach("kind", &kind)?;
    r.attach("seed", &cfg.seed.unwrap_or(0))?;
    r.attach("instance", inst)?;
    let seed = cfg.seed.unwrap_or(0);
    let space = &inst.space;
    match kind {
        PropertyKind::Central => {
            let c = CentralConfig { trials: cfg.trials.unwrap_or(200), seed, injected: inst.families.clone() };
            let v = central_subspace_check(space, &inst.subspace, inst.ambient.as_ref(), &c)?;
            sampler_checks(&mut r, "central", &v)?;
        }
        PropertyKind::Mideal => {
            let c = MidealConfig {
                trials: cfg.trials.unwrap_or(500),
                epsilon: cfg.tol.or(inst.epsilon).unwrap_or(1e-6),
                seed,
                injected: inst.families.clone(),
            };
            let v = mideal_3ball_sampler(space, &inst.subspace, &c)?;
            sampler_checks(&mut r, "3-ball property", &v)?;
        }
        PropertyKind::Ac => {
            let out = ac_dominator(space, &inst.subspace, &inst.points, inst.x()?)?;
            match &out {
                Intersection::Feasible { witness, max_excess, .. } => {
                    r.check(Check::at_most("dominator found", 0.0, *max_excess, FEAS_TOL, Oracle::Identity));
                    r.attach("dominator", witness)?;
                }
                Intersection::Infeasible { check, .. } => {
                    r.check(Check::holds("dominator found", false, format!("certified absence (valid: {})", check.valid), Oracle::Identity));
                    r.attach("counterexample", &inst.points)?;
                }
                Intersection::NotFound { best_gap, .. } => {
                    r.check(Check::holds("dominator found", false, format!("search failed, gap {best_gap:e}"), Oracle::Identity));
                }
            }
            r.attach("outcome", &out)?;
        }
        PropertyKind::AlmostConstrained => {
            let net = NetConfig { injected: inst.points.clone(), seed, ..Default::default() };
            let out = almost_constrained_probe(space, &inst.subspace, inst.x()?, &net)?;
            let (ok, seen) = match &out {
                AlmostConstrained::Candidate { p, .. } => (true, format!("norm-one candidate Px = {p:?}")),
                AlmostConstrained::Falsified { a, .. } => (false, format!("no dominator for a net of {} points", a.len())),
                AlmostConstrained::Inconclusive { reason, .. } => (false, reason.clone()),
            };
            r.check(Check::holds("norm-one projection onto Y from span{x, Y}", ok, seen, Oracle::derived("net refinement")));
            if let AlmostConstrained::Falsified { a, .. } = &out {
                r.attach("counterexample", a)?;
            }
            r.attach("outcome", &out)?;
        }
    }
    r.finish(started);
    Ok(r)
}

fn sampler_checks(r: &mut Report, what: &str, v: &SamplerVerdict) -> Result<()> {
    match v {
        SamplerVerdict::Pass { .. } => {
            r.check(Check::holds(what, true, label(v), Oracle::derived("ball sampler")));
        }
        SamplerVerdict::Fail { family, outcome, .. } => {
            let cert = match outcome {
                Intersection::Infeasible { check, .. } => format!("; certificate valid: {}", check.valid),
                _ => String::new(),
            };
            r.check(Check::holds(what, false, format!("{}{cert}", label(v)), Oracle::derived("ball sampler")));
            r.attach("counterexample", family)?;
        }
    }
    r.attach("verdict", v)
}

/// Re-run a property report on its recorded counterexample only.
pub fn replay_property(report_json: &str, cfg: &RunConfig) -> Result<Report> {
    let old: Report = parse(report_json)?;
    let kind: PropertyKind = serde_json::from_value(old.data.get("kind").cloned().unwrap_or_default())?;
    let mut inst: PropertyInstance = serde_json::from_value(
        old.data.get("instance").cloned().ok_or_else(|| Error::InvalidArgument("report has no instance".into()))?,
    )?;
    let cfg = RunConfig { trials: Some(0), ..cfg.clone() };
    match kind {
        PropertyKind::Central | PropertyKind::Mideal => {
            let family: BallFamily = serde_json::from_value(
                old.data.get("counterexample").cloned().ok_or_else(|| Error::InvalidArgument("report has no counterexample".into()))?,
            )?;
            inst.families = vec![family];
        }
        PropertyKind::Ac | PropertyKind::AlmostConstrained => {
            if let Some(points) = old.data.get("counterexample") {
                inst.points = serde_json::from_value(points.clone())?;
            }
        }
    }
    let mut r = property_report(kind, &inst, &cfg)?;
    r.command.push("replay".into());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RunConfig {
        RunConfig { trials: Some(20), ..Default::default() }
    }

    #[test]
    fn every_builtin_parses_and_passes() {
        for name in NAMES {
            let cfg = if name == "thm2.7" { RunConfig { trials: Some(200), ..Default::default() } } else { quick() };
            let r = run_repro(name, &cfg).unwrap();
            let failures: Vec<_> = r.failures().collect();
            assert!(r.passed, "{name}: {failures:?}");
        }
        assert!(run_repro("ex9.9", &quick()).is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_repro("thm2.8", &quick()).unwrap();
        let b = run_repro("thm2.8", &quick()).unwrap();
        assert_eq!(a.checks, b.checks);
        assert_eq!(a.data, b.data);
    }

    #[test]
    fn property_counterexample_replays() {
        let inst = PropertyInstance::from_json(
            r#"{"schema":1,"space":{"kind":"lp","p":"inf","dim":3},"subspace":{"kernel":[[1,1,1]]},
                "families":[[{"center":[-2,1,1],"radius":1.5},{"center":[1,1,-2],"radius":1.5},{"center":[1,-2,1],"radius":1.5}]]}"#,
        )
        .unwrap();
        let r = property_report(PropertyKind::Central, &inst, &quick()).unwrap();
        assert!(!r.passed);
        let replayed = replay_property(&r.render(crate::report::Format::Json).unwrap(), &quick()).unwrap();
        assert!(!replayed.passed);
        assert_eq!(replayed.data["counterexample"], r.data["counterexample"]);
    }

    #[test]
    fn center_report_on_two_points() {
        let inst = CenterInstance::from_json(
            r#"{"schema":1,"space":{"kind":"lp","p":1,"dim":2},"points":[[0,0],[2,2]],"f":{"kind":"weighted_max","weights":[1,1]}}"#,
        )
        .unwrap();
        let r = center_report(&inst, &RunConfig::default()).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert_eq!(r.data["rad"], 2.0);
    }
}
