//! Cheapest splitting `x = y + z` with `y ∈ Y`, `z ∈ Z`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::norm::{add_epigraph, sum_subspaces, NormSpec, Subspace, Vector};
use crate::opt::{lp_solve, subgradient_minimize, AffineExpr, LpBuilder, SolvePath, SubgradientConfig};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub y: Vector,
    pub z: Vector,
    /// `‖y‖ + ‖z‖`.
    pub value: f64,
    /// `value / ‖x‖`, and 1 for `x = 0`.
    pub ratio: f64,
    pub path: SolvePath,
}

/// Minimise `‖y‖ + ‖z‖` over `y ∈ Y`, `z ∈ Z`, `y + z = x`.
pub fn decompose_min_sum(space: &NormSpec, x: &Vector, y: &Subspace, z: &Subspace) -> Result<DecompositionResult> {
    let n = space.dim();
    for d in [x.dim(), y.ambient_dim(), z.ambient_dim()] {
        if d != n {
            return Err(Error::DimensionMismatch { expected: n, found: d });
        }
    }
    if !sum_subspaces(y, z)?.contains(x, 1e-9) {
        return Err(Error::InvalidArgument("x is not in Y + Z".into()));
    }
    let norm_x = space.norm(x.coords());
    let finish = |yv: Vector, zv: Vector, path| {
        let value = space.norm(yv.coords()) + space.norm(zv.coords());
        let ratio = if norm_x > 0.0 { value / norm_x } else { 1.0 };
        DecompositionResult { y: yv, z: zv, value, ratio, path }
    };
    if y.contains(x, 0.0) {
        return Ok(finish(x.clone(), Vector::zeros(n), SolvePath::Exact));
    }
    if z.contains(x, 0.0) {
        return Ok(finish(Vector::zeros(n), x.clone(), SolvePath::Exact));
    }
    if space.is_polyhedral() {
        let mut b = LpBuilder::new();
        let cy = b.add_vars(y.dim());
        let cz = b.add_vars(z.dim());
        let zero = vec![0.0; n];
        let ye = y.affine_point(&cy, &zero);
        let ze = z.affine_point(&cz, &zero);
        for k in 0..n {
            b.eq_zero(ye[k].clone().plus(&ze[k]).plus(&AffineExpr::constant(-x.coords()[k])));
        }
        let ty = add_epigraph(space, &mut b, &ye).expect("polyhedral");
        let tz = add_epigraph(space, &mut b, &ze).expect("polyhedral");
        b.set_objective(&AffineExpr::var(ty).plus_var(tz, 1.0));
        let out = lp_solve(&b.build())?;
        let u = out.point.filter(|_| out.status == crate::opt::LpStatus::Optimal).ok_or_else(|| {
            Error::Optimization("decomposition LP did not reach an optimum".into())
        })?;
        let yv = y.point(&cy.iter().map(|&k| u[k]).collect::<Vec<_>>());
        let zv = x.sub(&yv);
        return Ok(finish(yv, zv, SolvePath::Lp));
    }
    // x = y0 + z0, then y = y0 + w, z = z0 − w for w ∈ Y ∩ Z.
    let (y0, z0) = particular_split(x, y, z)?;
    let common = y.intersection(z)?;
    if common.dim() == 0 {
        return Ok(finish(y0, z0, SolvePath::Exact));
    }
    let objective = |c: &[f64]| {
        let w = common.point(c);
        let (a, b) = (y0.add(&w), z0.sub(&w));
        let mut g = space.subgradient(a.coords());
        linalg::axpy(-1.0, &space.subgradient(b.coords()), &mut g);
        (space.norm(a.coords()) + space.norm(b.coords()), common.coords_of(&g))
    };
    let scale = linalg::norm2(y0.coords()).max(linalg::norm2(z0.coords())).max(1e-3);
    let out = subgradient_minimize(objective, |_| {}, &vec![0.0; common.dim()], &SubgradientConfig::default().with_scale(scale));
    let w = common.point(&out.point);
    Ok(finish(y0.add(&w), z0.sub(&w), SolvePath::Subgradient))
}

/// Some `x = y0 + z0` from a least-squares solve on independent columns.
fn particular_split(x: &Vector, y: &Subspace, z: &Subspace) -> Result<(Vector, Vector)> {
    let mut cols: Vec<(bool, Vec<f64>)> = Vec::new();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for (from_y, b) in y.basis().iter().map(|b| (true, b)).chain(z.basis().iter().map(|b| (false, b))) {
        if let Some(q) = linalg::orthonormalize_against(&ortho, b.coords(), 1e-9) {
            ortho.push(q);
            cols.push((from_y, b.coords().to_vec()));
        }
    }
    let gram: Vec<Vec<f64>> = cols.iter().map(|a| cols.iter().map(|b| linalg::dot(&a.1, &b.1)).collect()).collect();
    let rhs: Vec<f64> = cols.iter().map(|a| linalg::dot(&a.1, x.coords())).collect();
    let c = linalg::solve(&gram, &rhs, 1e-12).ok_or_else(|| Error::Optimization("singular splitting system".into()))?;
    let mut yv = vec![0.0; x.dim()];
    for ((from_y, col), ci) in cols.iter().zip(&c) {
        if *from_y {
            linalg::axpy(*ci, col, &mut yv);
        }
    }
    let yv = Vector::new(yv)?;
    let zv = x.sub(&yv);
    Ok((yv, zv))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub gamma: f64,
    pub worst_x: Vector,
    pub min_ratio: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Largest `γ_x` over seeded unit vectors of `Y + Z`.
pub fn gamma_estimate(space: &NormSpec, y: &Subspace, z: &Subspace, samples: usize, seed: u64) -> Result<GammaEstimate> {
    let sum = sum_subspaces(y, z)?;
    if sum.dim() == 0 {
        return Err(Error::InvalidArgument("Y + Z is the zero subspace".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vector)> = None;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..samples.max(1) {
        let c: Vec<f64> = (0..sum.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = sum.point(&c);
        let nx = space.norm(x.coords());
        if nx < 1e-9 {
            continue;
        }
        let x = x.scale(1.0 / nx);
        let d = decompose_min_sum(space, &x, y, z)?;
        min_ratio = min_ratio.min(d.ratio);
        if best.as_ref().is_none_or(|b| d.ratio > b.0) {
            best = Some((d.ratio, x));
        }
    }
    let (gamma, worst_x) = best.ok_or_else(|| Error::Optimization("no usable samples".into()))?;
    Ok(GammaEstimate { gamma, worst_x, min_ratio, samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y1() -> Subspace {
        Subspace::from_basis(3, &[Vector::from([1.0, 0.0, -1.0])]).unwrap()
    }

    fn y2() -> Subspace {
        Subspace::from_basis(3, &[Vector::from([0.0, 1.0, -1.0])]).unwrap()
    }

    #[test]
    fn members_split_trivially() {
        let space = NormSpec::linf(3);
        let x = Vector::from([2.0, 0.0, -2.0]);
        let d = decompose_min_sum(&space, &x, &y1(), &y2()).unwrap();
        assert_eq!(d.ratio, 1.0);
        assert_eq!(d.z, Vector::zeros(3));
    }

    #[test]
    fn direct_sum_split_is_unique() {
        let space = NormSpec::linf(3);
        let x = Vector::from([1.0, 1.0, -2.0]);
        let d = decompose_min_sum(&space, &x, &y1(), &y2()).unwrap();
        // y = (1,0,-1), z = (0,1,-1)
        assert!((d.value - 2.0).abs() < 1e-9 && (d.ratio - 1.0).abs() < 1e-9);
        assert!(decompose_min_sum(&space, &Vector::from([1.0, 1.0, 1.0]), &y1(), &y2()).is_err());
    }

    #[test]
    fn smooth_path_with_overlap() {
        let space = NormSpec::l2(2);
        let y = Subspace::whole(2);
        let z = Subspace::coordinate(2, &[0]).unwrap();
        let x = Vector::from([3.0, 4.0]);
        let d = decompose_min_sum(&space, &x, &y, &z).unwrap();
        assert!((d.value - 5.0).abs() < 1e-9);
        let g = gamma_estimate(&NormSpec::l1(3), &y1(), &y2(), 50, 2).unwrap();
        assert!(g.min_ratio >= 1.0 - 1e-9 && g.gamma >= g.min_ratio);
    }
}
