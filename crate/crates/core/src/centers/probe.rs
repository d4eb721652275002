//! δ-center sampling and the (P₁) modulus `δ ↦ sup{d(v, Cent) : v ∈ δ-Cent}`.
//!
//! The neighbourhood in the definition of (P₁) is the closed ε-ball of the
//! space's own norm. All δ values of one call share a single sample pool, so
//! the reported excess is nonincreasing as δ decreases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{distance_to_cent, face_slack, AffinePiece, CenterLp, CenterProblem, CenterResult, FeasibleSet};
use crate::linalg;
use crate::norm::Vector;
use crate::opt::{lp_solve, AffineExpr};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Accepted rejection samples wanted per δ.
    pub samples: usize,
    pub max_attempts: usize,
    /// Extra random search directions when no LP bounding box is available.
    pub directions: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { samples: 200, max_attempts: 20_000, directions: 16, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaCenterProbe {
    pub delta: f64,
    pub epsilon: f64,
    pub samples: Vec<Vector>,
    /// Distance of each sample to the center set.
    pub distances: Vec<f64>,
    pub excess: f64,
    /// `excess ≤ ε`, i.e. the sampled δ-centers stay in `Cent + εB`.
    pub within_neighborhood: bool,
    pub sampler: SamplerConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusPoint {
    pub delta: f64,
    pub excess: f64,
    pub samples: usize,
}

struct PoolPoint {
    v: Vec<f64>,
    rf: f64,
    dist: f64,
}

fn single_piece(problem: &CenterProblem) -> Result<AffinePiece> {
    if let FeasibleSet::Union { pieces } = &problem.feasible {
        if pieces.len() != 1 {
            return Err(Error::InvalidArgument("δ-center probes need a single affine feasible piece".into()));
        }
    }
    Ok(problem.pieces().remove(0))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("δ must be finite and ≥ 0, got {delta}")));
    }
    Ok(())
}

/// Coordinate box of `{c : objective ≤ level}` from `2·dim` LPs; the
/// optimal vertices are returned as points.
fn lp_box(lp: &CenterLp, piece: &AffinePiece, level: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    let d = lp.coords.len();
    let (mut lo, mut hi, mut vertices) = (vec![0.0; d], vec![0.0; d], Vec::new());
    let base = lp.with_level(level);
    for j in 0..d {
        for sign in [1.0, -1.0] {
            let mut b = base.clone();
            b.set_objective(&AffineExpr::var(lp.coords[j]).scaled(sign));
            let out = lp_solve(&b.build())?;
            let optimal = out.is_optimal();
            let u = out
                .point
                .filter(|_| optimal)
                .ok_or_else(|| Error::Optimization(format!("δ-box LP ended {:?}", out.status)))?;
            let c: Vec<f64> = lp.coords.iter().map(|&k| u[k]).collect();
            if sign > 0.0 {
                lo[j] = c[j];
            } else {
                hi[j] = c[j];
            }
            vertices.push(piece.point(&c));
        }
    }
    Ok((lo, hi, vertices))
}

/// Boundary search along coordinate and random directions from `c0`; the
/// resulting box is inflated by a factor 2 about `c0`.
fn radial_box(
    problem: &CenterProblem,
    piece: &AffinePiece,
    c0: &[f64],
    level: f64,
    directions: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let d = c0.len();
    let inside = |c: &[f64]| problem.rf(&piece.point(c)) <= level;
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for j in 0..d {
        for s in [1.0, -1.0] {
            let mut u = vec![0.0; d];
            u[j] = s;
            dirs.push(u);
        }
    }
    for _ in 0..directions {
        let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = linalg::norm2(&u);
        if n > 1e-6 {
            dirs.push(u.iter().map(|x| x / n).collect());
        }
    }
    let along = |u: &[f64], s: f64| c0.iter().zip(u).map(|(a, b)| a + s * b).collect::<Vec<f64>>();
    let (mut lo, mut hi) = (c0.to_vec(), c0.to_vec());
    let mut boundary = Vec::new();
    for u in &dirs {
        let mut s = 1.0;
        let mut grow = 0;
        while inside(&along(u, s)) && grow < 60 {
            s *= 2.0;
            grow += 1;
        }
        let (mut a, mut b) = (0.0, s);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if inside(&along(u, m)) {
                a = m;
            } else {
                b = m;
            }
        }
        let c = along(u, a);
        for j in 0..d {
            lo[j] = lo[j].min(c[j]);
            hi[j] = hi[j].max(c[j]);
        }
        boundary.push(piece.point(&c));
    }
    for j in 0..d {
        lo[j] = c0[j] - 2.0 * (c0[j] - lo[j]);
        hi[j] = c0[j] + 2.0 * (hi[j] - c0[j]);
    }
    (lo, hi, boundary)
}

fn build_pool(problem: &CenterProblem, result: &CenterResult, deltas: &[f64], cfg: &SamplerConfig) -> Result<Vec<PoolPoint>> {
    for &d in deltas {
        check_delta(d)?;
    }
    let piece = single_piece(problem)?;
    let lp = if result.face.is_some() { CenterLp::new(problem, &piece) } else { None };
    let c0 = piece.directions.coords_of(&linalg::sub(result.minimizer.coords(), piece.offset.coords()));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut raw = vec![result.minimizer.coords().to_vec()];
    for &delta in deltas {
        let level = result.rad + delta + face_slack(result.rad);
        let (lo, hi, extra) = match &lp {
            Some(lp) => lp_box(lp, &piece, level)?,
            None => radial_box(problem, &piece, &c0, level, cfg.directions, &mut rng),
        };
        raw.extend(extra);
        let mut accepted = 0;
        for _ in 0..cfg.max_attempts {
            if accepted >= cfg.samples {
                break;
            }
            let c: Vec<f64> = lo.iter().zip(&hi).map(|(&a, &b)| if b > a { rng.gen_range(a..=b) } else { a }).collect();
            let v = piece.point(&c);
            if problem.rf(&v) <= level {
                raw.push(v);
                accepted += 1;
            }
        }
        if accepted == 0 {
            log::debug!("no rejection samples accepted at δ = {delta}");
        }
    }
    raw.into_iter()
        .map(|v| {
            let rf = problem.rf(&v);
            let dist = distance_to_cent(problem, result, &v)?;
            Ok(PoolPoint { v, rf, dist })
        })
        .collect()
}

fn members<'a>(pool: &'a [PoolPoint], result: &CenterResult, delta: f64) -> impl Iterator<Item = &'a PoolPoint> {
    let level = result.rad + delta + face_slack(result.rad);
    pool.iter().filter(move |p| p.rf <= level)
}

/// Sample `δ-Cent` and measure how far it strays from `Cent`.
pub fn delta_center_probe(
    problem: &CenterProblem,
    result: &CenterResult,
    delta: f64,
    epsilon: f64,
    cfg: &SamplerConfig,
) -> Result<DeltaCenterProbe> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("neighbourhood radius ε must be > 0".into()));
    }
    let pool = build_pool(problem, result, &[delta], cfg)?;
    let chosen: Vec<&PoolPoint> = members(&pool, result, delta).collect();
    if chosen.is_empty() {
        return Err(Error::Optimization("sampler found no δ-centers".into()));
    }
    let excess = chosen.iter().map(|p| p.dist).fold(0.0, f64::max);
    Ok(DeltaCenterProbe {
        delta,
        epsilon,
        samples: chosen.iter().map(|p| Vector::new(p.v.clone())).collect::<Result<_>>()?,
        distances: chosen.iter().map(|p| p.dist).collect(),
        excess,
        within_neighborhood: excess <= epsilon,
        sampler: cfg.clone(),
    })
}

/// The modulus curve over `deltas`, from one shared pool.
pub fn p1_modulus(problem: &CenterProblem, result: &CenterResult, deltas: &[f64], cfg: &SamplerConfig) -> Result<Vec<ModulusPoint>> {
    let pool = build_pool(problem, result, deltas, cfg)?;
    Ok(deltas
        .iter()
        .map(|&delta| {
            let (mut excess, mut samples) = (0.0_f64, 0);
            for p in members(&pool, result, delta) {
                excess = excess.max(p.dist);
                samples += 1;
            }
            ModulusPoint { delta, excess, samples }
        })
        .collect())
}

/// CSV with columns `delta,excess,samples`.
pub fn modulus_csv(points: &[ModulusPoint]) -> String {
    let mut out = String::from("delta,excess,samples\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.delta, p.excess, p.samples));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centers::{solve_center, FcmcFunction, FiniteSet};
    use crate::norm::NormSpec;

    fn segment_problem() -> CenterProblem {
        CenterProblem {
            space: NormSpec::linf(2),
            feasible: FeasibleSet::Whole,
            points: FiniteSet::new(vec![Vector::from([-1.0, 0.0]), Vector::from([1.0, 0.0])]).unwrap(),
            f: FcmcFunction::max(2),
        }
    }

    #[test]
    fn zero_delta_has_no_excess() {
        let p = segment_problem();
        let r = solve_center(&p).unwrap();
        let probe = delta_center_probe(&p, &r, 0.0, 1e-3, &SamplerConfig::default()).unwrap();
        assert!(probe.excess < 1e-8, "{}", probe.excess);
        assert!(probe.samples.len() > 10);
    }

    #[test]
    fn segment_distances_match_closed_form() {
        let p = segment_problem();
        let r = solve_center(&p).unwrap();
        let probe = delta_center_probe(&p, &r, 0.1, 1.0, &SamplerConfig::default()).unwrap();
        for (s, d) in probe.samples.iter().zip(&probe.distances) {
            let (a, b) = (s.coords()[0], s.coords()[1]);
            // max(|a ± 1|, |b|) ≤ 1.1 on δ-Cent
            assert!((a - 1.0).abs().max((a + 1.0).abs()).max(b.abs()) <= 1.1 + 1e-8);
            // ℓ∞ distance to the segment {0} × [-1, 1]
            let closed = a.abs().max((b.abs() - 1.0).max(0.0));
            assert!((d - closed).abs() < 1e-8, "{d} vs {closed}");
        }
        assert!(probe.excess <= 0.1 + 1e-8);
    }

    #[test]
    fn modulus_is_monotone_and_exports() {
        let p = segment_problem();
        let r = solve_center(&p).unwrap();
        let curve = p1_modulus(&p, &r, &[0.1, 0.01, 0.001, 0.0], &SamplerConfig::default()).unwrap();
        assert!(curve.windows(2).all(|w| w[1].excess <= w[0].excess));
        assert!(curve[3].excess < 1e-8);
        let csv = modulus_csv(&curve);
        assert!(csv.starts_with("delta,excess,samples\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn smooth_problem_uses_radial_box() {
        let p = CenterProblem { space: NormSpec::l2(2), ..segment_problem() };
        let r = solve_center(&p).unwrap();
        assert!(r.face.is_none());
        let curve = p1_modulus(&p, &r, &[0.1, 0.01], &SamplerConfig::default()).unwrap();
        // r_f(v) = max |v ∓ e_1|₂ ≥ √(1 + |v|²), so δ-Cent lies in a ball of radius √(2δ + δ²).
        assert!(curve[0].excess <= (0.2f64 + 0.01).sqrt() + 1e-3);
        assert!(curve[1].excess <= curve[0].excess);
    }
}
