//! Norm-one projections given by their value on one transversal vector.
//!
//! On `span{x, Y}` a projection onto `Y` is determined by `p = Px`:
//! `P(αx + y) = αp + y`. By homogeneity `‖P‖ ≤ 1` iff
//! `‖p + y‖ ≤ ‖x + y‖` for every `y ∈ Y`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ac_dominator, random_in, Intersection};
use crate::linalg;
use crate::norm::{NormSpec, Subspace, Vector};
use crate::{Error, Result, FEAS_TOL};

const EXACT_MAX_DIM: usize = 4;
const GENERATOR_CAP: usize = 4096;
const MAX_COMBINATIONS: u64 = 3_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionData {
    pub subspace: Subspace,
    pub x: Vector,
    pub p: Vector,
}

impl ProjectionData {
    /// Checks `p ∈ Y` and `x ∉ Y`.
    pub fn new(subspace: Subspace, x: Vector, p: Vector) -> Result<Self> {
        let n = subspace.ambient_dim();
        for v in [&x, &p] {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
            }
        }
        if !subspace.contains(&p, 1e-9) {
            return Err(Error::Precondition("image p is not in the subspace".into()));
        }
        if subspace.contains(&x, 1e-9) {
            return Err(Error::Precondition("transversal x lies in the subspace".into()));
        }
        Ok(ProjectionData { subspace, x, p })
    }

    /// `P(αx + y) = αp + y`.
    pub fn apply(&self, alpha: f64, y: &Vector) -> Vector {
        self.p.scale(alpha).add(y)
    }

    /// `‖p + y‖ / ‖x + y‖`.
    fn ratio(&self, space: &NormSpec, y: &[f64]) -> f64 {
        let num: Vec<f64> = self.p.coords().iter().zip(y).map(|(a, b)| a + b).collect();
        let den: Vec<f64> = self.x.coords().iter().zip(y).map(|(a, b)| a + b).collect();
        space.norm(&num) / space.norm(&den)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum VerifyMode {
    /// Vertex enumeration of the unit ball of `span{x, Y}`; needs a
    /// polyhedral norm and `dim Y + 1 ≤ 4`, otherwise falls back to sampling.
    #[default]
    Exact,
    Sampled { samples: usize, seed: u64 },
}

const FALLBACK_SAMPLES: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProjectionVerdict {
    Accept { exact: bool, fell_back: bool, max_ratio: f64 },
    /// `‖p + y‖ > ‖x + y‖` at `y`.
    Reject { y: Vector, excess: f64, exact: bool },
}

impl ProjectionVerdict {
    pub fn accepted(&self) -> bool {
        matches!(self, ProjectionVerdict::Accept { .. })
    }
}

/// Decide whether `αx + y ↦ αp + y` has norm at most one.
pub fn verify_norm1_projection(space: &NormSpec, pd: &ProjectionData, mode: VerifyMode) -> Result<ProjectionVerdict> {
    let n = space.dim();
    if pd.subspace.ambient_dim() != n || pd.x.dim() != n || pd.p.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: pd.x.dim() });
    }
    if pd.subspace.contains(&pd.x, 1e-9) {
        return Err(Error::Precondition("transversal x lies in the subspace".into()));
    }
    match mode {
        VerifyMode::Exact => match exact(space, pd) {
            Some(v) => Ok(v),
            None => Ok(match sampled(space, pd, FALLBACK_SAMPLES, 0) {
                ProjectionVerdict::Accept { max_ratio, .. } => {
                    ProjectionVerdict::Accept { exact: false, fell_back: true, max_ratio }
                }
                reject => reject,
            }),
        },
        VerifyMode::Sampled { samples, seed } => Ok(sampled(space, pd, samples, seed)),
    }
}

fn reject_at(space: &NormSpec, pd: &ProjectionData, y: Vec<f64>, exact: bool) -> ProjectionVerdict {
    let py: Vec<f64> = pd.p.coords().iter().zip(&y).map(|(a, b)| a + b).collect();
    let xy: Vec<f64> = pd.x.coords().iter().zip(&y).map(|(a, b)| a + b).collect();
    let excess = space.norm(&py) - space.norm(&xy);
    ProjectionVerdict::Reject { y: Vector::new(y).expect("finite witness"), excess, exact }
}

fn exact(space: &NormSpec, pd: &ProjectionData) -> Option<ProjectionVerdict> {
    let m = pd.subspace.dim() + 1;
    if !space.is_polyhedral() || m > EXACT_MAX_DIM {
        return None;
    }
    let gens = space.explicit_generators(GENERATOR_CAP)?;
    // Columns of W = span{x, Y} in the coordinates (α, c).
    let mut cols = vec![pd.x.coords().to_vec()];
    cols.extend(pd.subspace.basis().iter().map(|b| b.coords().to_vec()));
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for g in &gens {
        let h: Vec<f64> = cols.iter().map(|c| linalg::dot(g, c)).collect();
        if linalg::max_abs(&h) <= 1e-12 {
            continue;
        }
        if !rows.iter().any(|r| r.iter().zip(&h).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()))) {
            rows.push(h);
        }
    }
    if binomial(rows.len() as u64, m as u64) > MAX_COMBINATIONS {
        return None;
    }
    let mut max_ratio = 0.0_f64;
    let mut combo: Vec<usize> = (0..m).collect();
    let ones = vec![1.0; m];
    loop {
        let a: Vec<Vec<f64>> = combo.iter().map(|&i| rows[i].clone()).collect();
        if let Some(s) = linalg::solve(&a, &ones, 1e-10) {
            let norm_w = rows.iter().map(|h| linalg::dot(h, &s)).fold(f64::NEG_INFINITY, f64::max);
            if norm_w <= 1.0 + 1e-9 && norm_w > 0.5 {
                // w = s_0 x + Σ s_j b_j,  Pw = s_0 p + Σ s_j b_j
                let y = pd.subspace.point(&s[1..]);
                let pw: Vec<f64> = pd.p.coords().iter().zip(y.coords()).map(|(p, y)| s[0] * p + y).collect();
                let ratio = space.norm(&pw) / norm_w;
                max_ratio = max_ratio.max(ratio);
                if ratio > 1.0 + FEAS_TOL && s[0].abs() > 1e-12 {
                    return Some(reject_at(space, pd, y.scale(1.0 / s[0]).into_inner(), true));
                }
            }
        }
        if !next_combination(&mut combo, rows.len()) {
            break;
        }
    }
    Some(ProjectionVerdict::Accept { exact: true, fell_back: false, max_ratio })
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Seeded random `y` plus a pattern search maximising `‖p+y‖/‖x+y‖`.
fn sampled(space: &NormSpec, pd: &ProjectionData, samples: usize, seed: u64) -> ProjectionVerdict {
    let y_sub = &pd.subspace;
    let d = y_sub.dim();
    if d == 0 {
        let r = pd.ratio(space, &vec![0.0; space.dim()]);
        return if r <= 1.0 + FEAS_TOL {
            ProjectionVerdict::Accept { exact: false, fell_back: false, max_ratio: r }
        } else {
            reject_at(space, pd, vec![0.0; space.dim()], false)
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = 1.0 + linalg::norm2(pd.x.coords());
    let ratio_at = |c: &[f64]| pd.ratio(space, y_sub.point(c).coords());
    let mut starts: Vec<(f64, Vec<f64>)> = vec![(ratio_at(&vec![0.0; d]), vec![0.0; d])];
    let toward_x: Vec<f64> = y_sub.coords_of(pd.x.coords()).iter().map(|c| -c).collect();
    starts.push((ratio_at(&toward_x), toward_x));
    for _ in 0..samples {
        let scale = base * 10f64.powf(rng.gen_range(-2.0..2.0));
        let c: Vec<f64> = (0..d).map(|_| scale * rng.gen_range(-1.0..1.0)).collect();
        starts.push((ratio_at(&c), c));
    }
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));
    starts.truncate(5);
    let mut best = starts[0].clone();
    for (mut r, mut c) in starts {
        let mut h = 0.25 * linalg::max_abs(&c).max(1.0);
        while h > 1e-10 {
            let mut moved = false;
            for j in 0..d {
                for s in [1.0, -1.0] {
                    let mut t = c.clone();
                    t[j] += s * h;
                    let rt = ratio_at(&t);
                    if rt > r {
                        (r, c, moved) = (rt, t, true);
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        if r > best.0 {
            best = (r, c);
        }
    }
    if best.0 > 1.0 + FEAS_TOL {
        reject_at(space, pd, y_sub.point(&best.1).into_inner(), false)
    } else {
        ProjectionVerdict::Accept { exact: false, fell_back: false, max_ratio: best.0 }
    }
}

/// A linear map `ℝⁿ → ℝⁿ` stored as a dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct FullProjection {
    rows: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for FullProjection {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        FullProjection::new(rows)
    }
}

impl From<FullProjection> for Vec<Vec<f64>> {
    fn from(p: FullProjection) -> Self {
        p.rows
    }
}

impl FullProjection {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        for r in &rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(FullProjection { rows })
    }

    pub fn identity(n: usize) -> Self {
        Self::coordinate(n, &(0..n).collect::<Vec<_>>())
    }

    /// Keeps the listed coordinates and zeroes the rest.
    pub fn coordinate(n: usize, keep: &[usize]) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0.0; n];
                if keep.contains(&i) {
                    r[i] = 1.0;
                }
                r
            })
            .collect();
        FullProjection { rows }
    }

    /// `x ↦ φ(x) y`.
    pub fn rank_one(y: &Vector, phi: &[f64]) -> Result<Self> {
        if phi.len() != y.dim() {
            return Err(Error::DimensionMismatch { expected: y.dim(), found: phi.len() });
        }
        FullProjection::new(y.coords().iter().map(|&yi| phi.iter().map(|&f| yi * f).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        Vector::new(linalg::mat_vec(&self.rows, x.coords())).expect("finite product")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FullProjection) -> FullProjection {
        let n = self.dim();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| self.rows[i][k] * other.rows[k][j]).sum()).collect())
            .collect();
        FullProjection { rows }
    }

    /// `max |(P² − P)_{ij}|`.
    pub fn idempotence_residual(&self) -> f64 {
        let sq = self.compose(self);
        sq.rows.iter().flatten().zip(self.rows.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `P² = P` with no tolerance.
    pub fn is_idempotent_exact(&self) -> bool {
        self.compose(self) == *self
    }

    pub fn range(&self) -> Subspace {
        let n = self.dim();
        let cols: Vec<Vec<f64>> = (0..n).map(|j| self.rows.iter().map(|r| r[j]).collect()).collect();
        let basis = linalg::span_basis(&cols, 1e-9);
        let vs: Vec<Vector> = basis.into_iter().map(|b| Vector::new(b).expect("finite")).collect();
        Subspace::from_basis(n, &vs).expect("orthonormal basis")
    }

    /// `P(Z) ⊆ Z` on a basis of `Z`.
    pub fn maps_into(&self, z: &Subspace, tol: f64) -> bool {
        z.basis().iter().all(|b| z.contains(&self.apply(b), tol))
    }

    /// `max ‖Pw‖ / ‖w‖` over seeded samples (coordinate vectors included).
    pub fn sampled_norm(&self, space: &NormSpec, samples: usize, seed: u64) -> f64 {
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = (0..n)
            .map(|i| {
                let e = Vector::unit(n, i);
                space.norm(self.apply(&e).coords())
            })
            .fold(0.0, f64::max);
        for _ in 0..samples {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nw = space.norm(&w);
            if nw > 1e-12 {
                best = best.max(space.norm(&linalg::mat_vec(&self.rows, &w)) / nw);
            }
        }
        best
    }

    /// `diag(P_1, …, P_k)`.
    pub fn block_diagonal(parts: &[FullProjection]) -> FullProjection {
        let n: usize = parts.iter().map(FullProjection::dim).sum();
        let mut rows = vec![vec![0.0; n]; n];
        let mut off = 0;
        for p in parts {
            for (i, r) in p.rows.iter().enumerate() {
                rows[off + i][off..off + p.dim()].copy_from_slice(r);
            }
            off += p.dim();
        }
        FullProjection { rows }
    }

    /// The restriction to `span{x, range}` as [`ProjectionData`].
    pub fn projection_data(&self, x: &Vector) -> Result<ProjectionData> {
        ProjectionData::new(self.range(), x.clone(), self.apply(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    /// Points of `Y` placed in the first net.
    #[serde(default)]
    pub injected: Vec<Vector>,
    pub random_points: usize,
    /// Each round adds one rejection witness to the net.
    pub max_rounds: usize,
    pub verify: VerifyMode,
    pub seed: u64,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig { injected: Vec::new(), random_points: 4, max_rounds: 25, verify: VerifyMode::Exact, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlmostConstrained {
    /// `p` dominates the net and passed [`verify_norm1_projection`].
    Candidate { p: Vector, verdict: ProjectionVerdict, net: Vec<Vector> },
    /// No `y ∈ Y` satisfies `‖y − a‖ ≤ ‖x − a‖` for all `a` in `a`.
    Falsified { a: Vec<Vector>, outcome: Intersection },
    Inconclusive { net: Vec<Vector>, reason: String },
}

/// Look for `p = Px` of a norm-one projection `span{x, Y} → Y` by growing
/// finite nets `A ⊂ Y` and asking for a common dominator.
pub fn almost_constrained_probe(space: &NormSpec, y: &Subspace, x: &Vector, cfg: &NetConfig) -> Result<AlmostConstrained> {
    if y.contains(x, 1e-9) {
        return Err(Error::Precondition("x lies in Y".into()));
    }
    let mut net: Vec<Vector> = cfg.injected.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let scale = 2.0 * (1.0 + linalg::norm2(x.coords()));
    for _ in 0..cfg.random_points {
        net.push(random_in(&mut rng, y, scale));
    }
    if net.is_empty() {
        net.push(Vector::zeros(space.dim()));
    }
    for _ in 0..=cfg.max_rounds {
        match ac_dominator(space, y, &net, x)? {
            Intersection::Feasible { witness, .. } => {
                let pd = ProjectionData::new(y.clone(), x.clone(), witness.clone())?;
                match verify_norm1_projection(space, &pd, cfg.verify)? {
                    verdict @ ProjectionVerdict::Accept { .. } => {
                        return Ok(AlmostConstrained::Candidate { p: witness, verdict, net });
                    }
                    ProjectionVerdict::Reject { y: bad, .. } => net.push(bad.scale(-1.0)),
                }
            }
            outcome @ Intersection::Infeasible { .. } => return Ok(AlmostConstrained::Falsified { a: net, outcome }),
            Intersection::NotFound { best_gap, .. } => {
                return Ok(AlmostConstrained::Inconclusive {
                    net,
                    reason: format!("no dominator found (gap {best_gap:e}); non-polyhedral search is not exhaustive"),
                });
            }
        }
    }
    Ok(AlmostConstrained::Inconclusive { net, reason: format!("net budget of {} rounds exhausted", cfg.max_rounds) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::LinearFunctional;

    fn v3(c: [f64; 3]) -> Vector {
        Vector::from(c)
    }

    #[test]
    fn coordinate_projection_is_accepted_in_both_modes() {
        let space = NormSpec::linf(3);
        let p = FullProjection::coordinate(3, &[0, 1]);
        let pd = p.projection_data(&v3([1.0, -2.0, 3.0])).unwrap();
        assert!(verify_norm1_projection(&space, &pd, VerifyMode::Exact).unwrap().accepted());
        assert!(verify_norm1_projection(&space, &pd, VerifyMode::Sampled { samples: 300, seed: 1 }).unwrap().accepted());
    }

    #[test]
    fn bad_image_is_rejected_with_witness() {
        let space = NormSpec::l1(3);
        let y = Subspace::coordinate(3, &[0]).unwrap();
        let pd = ProjectionData::new(y, v3([0.0, 1.0, 0.0]), v3([5.0, 0.0, 0.0])).unwrap();
        for mode in [VerifyMode::Exact, VerifyMode::Sampled { samples: 200, seed: 3 }] {
            match verify_norm1_projection(&space, &pd, mode).unwrap() {
                ProjectionVerdict::Reject { y, excess, .. } => {
                    assert!(excess > 0.0);
                    let lhs = space.norm(pd.p.add(&y).coords());
                    let rhs = space.norm(pd.x.add(&y).coords());
                    assert!(lhs > rhs);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn degenerate_cases() {
        let space = NormSpec::l2(2);
        let zero = Subspace::zero(2);
        let pd = ProjectionData::new(zero, Vector::from([1.0, 1.0]), Vector::zeros(2)).unwrap();
        assert!(verify_norm1_projection(&space, &pd, VerifyMode::Exact).unwrap().accepted());
        let axis = Subspace::coordinate(2, &[0]).unwrap();
        assert!(ProjectionData::new(axis, Vector::from([1.0, 0.0]), Vector::from([1.0, 0.0])).is_err());
    }

    #[test]
    fn probe_falsifies_the_sum_plane() {
        let space = NormSpec::linf(3);
        let plane = Subspace::from_kernel(3, &[LinearFunctional(vec![1.0, 1.0, 1.0])]).unwrap();
        let cfg = NetConfig {
            injected: vec![v3([-2.0, 1.0, 1.0]), v3([1.0, 1.0, -2.0]), v3([1.0, -2.0, 1.0])],
            random_points: 0,
            ..Default::default()
        };
        match almost_constrained_probe(&space, &plane, &v3([-0.5, -0.5, -0.5]), &cfg).unwrap() {
            AlmostConstrained::Falsified { a, .. } => assert_eq!(a.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn probe_finds_coordinate_projection() {
        let space = NormSpec::linf(3);
        let y = Subspace::coordinate(3, &[0, 2]).unwrap();
        match almost_constrained_probe(&space, &y, &v3([0.3, 1.0, -0.7]), &NetConfig::default()).unwrap() {
            AlmostConstrained::Candidate { verdict, .. } => assert!(verdict.accepted()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn full_projection_algebra() {
        let p = FullProjection::rank_one(&v3([1.0, 1.0, 1.0]), &[1.0, 0.0, 0.0]).unwrap();
        assert!(p.is_idempotent_exact());
        assert_eq!(p.range().dim(), 1);
        assert!(p.sampled_norm(&NormSpec::linf(3), 500, 0) <= 1.0 + 1e-12);
        let lift = FullProjection::block_diagonal(&[p.clone(), p.clone()]);
        assert_eq!(lift.dim(), 6);
        assert!(lift.is_idempotent_exact());
    }
}
