use serde::{Deserialize, Serialize};

use super::{add_epigraph, LinearFunctional, NormSpec, Vector};
use crate::linalg;
use crate::opt::{lp_solve, subgradient_minimize, AffineExpr, LpBuilder, SolvePath, SubgradientConfig};
use crate::{Error, Result};

const DEPENDENCE_TOL: f64 = 1e-9;

/// A linear subspace of `ℝⁿ`, carried both as an (Euclidean-orthonormal)
/// basis and as the common kernel of (orthonormal) functionals.
///
/// The orthonormalisation is for conditioning only; norms are never
/// measured with the Euclidean structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRepr", into = "SubspaceRepr")]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vector>,
    kernel: Vec<LinearFunctional>,
}

/// JSON shape: `{"basis": [[...]]}` or `{"kernel": [[...]]}`; `dim` is
/// required only when the list is empty.
#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel: Option<Vec<Vec<f64>>>,
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = Error;

    fn try_from(r: SubspaceRepr) -> Result<Self> {
        let infer = |list: &Vec<Vec<f64>>| r.dim.or_else(|| list.first().map(Vec::len));
        match (&r.basis, &r.kernel) {
            (Some(b), None) => {
                let n = infer(b).ok_or_else(|| Error::InvalidArgument("empty basis needs \"dim\"".into()))?;
                let vs = b.iter().cloned().map(Vector::new).collect::<Result<Vec<_>>>()?;
                Subspace::from_basis(n, &vs)
            }
            (None, Some(k)) => {
                let n = infer(k).ok_or_else(|| Error::InvalidArgument("empty kernel needs \"dim\"".into()))?;
                let fs: Vec<LinearFunctional> = k.iter().cloned().map(LinearFunctional).collect();
                Subspace::from_kernel(n, &fs)
            }
            _ => Err(Error::InvalidArgument("subspace needs exactly one of \"basis\" or \"kernel\"".into())),
        }
    }
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> Self {
        SubspaceRepr {
            dim: Some(s.ambient_dim),
            basis: Some(s.basis.into_iter().map(Vector::into_inner).collect()),
            kernel: None,
        }
    }
}

impl Subspace {
    /// Span of linearly independent `vectors`.
    pub fn from_basis(ambient_dim: usize, vectors: &[Vector]) -> Result<Self> {
        for v in vectors {
            if v.dim() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: v.dim() });
            }
        }
        let raw: Vec<Vec<f64>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
        let basis = linalg::gram_schmidt(&raw, DEPENDENCE_TOL).map_err(|index| Error::DependentSet { index })?;
        let kernel = linalg::orth_complement(&basis, ambient_dim);
        Ok(Subspace::assemble(ambient_dim, basis, kernel))
    }

    /// Common kernel of linearly independent functionals.
    pub fn from_kernel(ambient_dim: usize, functionals: &[LinearFunctional]) -> Result<Self> {
        for f in functionals {
            if f.dim() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: f.dim() });
            }
            if f.0.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        let raw: Vec<Vec<f64>> = functionals.iter().map(|f| f.0.clone()).collect();
        let kernel = linalg::gram_schmidt(&raw, DEPENDENCE_TOL).map_err(|index| Error::DependentSet { index })?;
        let basis = linalg::orth_complement(&kernel, ambient_dim);
        Ok(Subspace::assemble(ambient_dim, basis, kernel))
    }

    pub fn whole(n: usize) -> Self {
        let basis = (0..n).map(|i| Vector::unit(n, i).into_inner()).collect();
        Subspace::assemble(n, basis, Vec::new())
    }

    pub fn zero(n: usize) -> Self {
        let kernel = (0..n).map(|i| Vector::unit(n, i).into_inner()).collect();
        Subspace::assemble(n, Vec::new(), kernel)
    }

    /// Span of the listed coordinate axes (0-based).
    pub fn coordinate(n: usize, axes: &[usize]) -> Result<Self> {
        let vs: Vec<Vector> = axes.iter().map(|&i| Vector::unit(n, i)).collect();
        Subspace::from_basis(n, &vs)
    }

    fn assemble(ambient_dim: usize, basis: Vec<Vec<f64>>, kernel: Vec<Vec<f64>>) -> Self {
        Subspace {
            ambient_dim,
            basis: basis.into_iter().map(Vector::from_raw).collect(),
            kernel: kernel.into_iter().map(LinearFunctional).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn kernel(&self) -> &[LinearFunctional] {
        &self.kernel
    }

    pub fn is_whole(&self) -> bool {
        self.kernel.is_empty()
    }

    /// Euclidean distance from `x` to the subspace.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.kernel.iter().map(|k| k.apply(x).powi(2)).sum::<f64>().sqrt()
    }

    /// Membership with tolerance relative to `max(1, |x|₂)`.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        x.dim() == self.ambient_dim && self.residual(x.coords()) <= tol * linalg::norm2(x.coords()).max(1.0)
    }

    /// Coordinates of the orthogonal projection of `x` in the basis.
    pub fn coords_of(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| linalg::dot(b.coords(), x)).collect()
    }

    /// `Σ c_j b_j`.
    pub fn point(&self, c: &[f64]) -> Vector {
        let mut v = vec![0.0; self.ambient_dim];
        for (b, &cj) in self.basis.iter().zip(c) {
            linalg::axpy(cj, b.coords(), &mut v);
        }
        Vector::from_raw(v)
    }

    /// Euclidean orthogonal projection.
    pub fn project(&self, x: &Vector) -> Vector {
        self.point(&self.coords_of(x.coords()))
    }

    /// The affine expressions `offset + Σ c_j b_j` in LP variables `vars`.
    pub(crate) fn affine_point(&self, vars: &[usize], offset: &[f64]) -> Vec<AffineExpr> {
        (0..self.ambient_dim)
            .map(|k| {
                let mut e = AffineExpr::constant(offset[k]);
                for (b, &v) in self.basis.iter().zip(vars) {
                    let c = b.coords()[k];
                    if c != 0.0 {
                        e = e.plus_var(v, c);
                    }
                }
                e
            })
            .collect()
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        sum_subspaces(self, other)
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: other.ambient_dim });
        }
        let all: Vec<Vec<f64>> = self.kernel.iter().chain(&other.kernel).map(|k| k.0.clone()).collect();
        let kernel = linalg::span_basis(&all, DEPENDENCE_TOL);
        let basis = linalg::orth_complement(&kernel, self.ambient_dim);
        Ok(Subspace::assemble(self.ambient_dim, basis, kernel))
    }

    pub fn is_subspace_of(&self, other: &Subspace, tol: f64) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis.iter().all(|b| other.contains(b, tol))
    }

    /// Block-diagonal direct sum `Y_1 ⊕ … ⊕ Y_k`.
    pub fn direct_sum(parts: &[Subspace]) -> Subspace {
        let n: usize = parts.iter().map(|p| p.ambient_dim).sum();
        let mut basis = Vec::new();
        let mut kernel = Vec::new();
        let mut offset = 0;
        for p in parts {
            let embed = |v: &[f64]| {
                let mut w = vec![0.0; n];
                w[offset..offset + v.len()].copy_from_slice(v);
                w
            };
            basis.extend(p.basis.iter().map(|b| embed(b.coords())));
            kernel.extend(p.kernel.iter().map(|k| embed(&k.0)));
            offset += p.ambient_dim;
        }
        Subspace::assemble(n, basis, kernel)
    }
}

pub fn subspace_from_basis(ambient: &NormSpec, vectors: &[Vector]) -> Result<Subspace> {
    Subspace::from_basis(ambient.dim(), vectors)
}

pub fn subspace_from_kernel(ambient: &NormSpec, functionals: &[LinearFunctional]) -> Result<Subspace> {
    Subspace::from_kernel(ambient.dim(), functionals)
}

/// `Y + Z`: span of the union of both bases.
pub fn sum_subspaces(y: &Subspace, z: &Subspace) -> Result<Subspace> {
    if y.ambient_dim != z.ambient_dim {
        return Err(Error::DimensionMismatch { expected: y.ambient_dim, found: z.ambient_dim });
    }
    let all: Vec<Vec<f64>> = y.basis.iter().chain(&z.basis).map(|b| b.coords().to_vec()).collect();
    let basis = linalg::span_basis(&all, DEPENDENCE_TOL);
    let kernel = linalg::orth_complement(&basis, y.ambient_dim);
    Ok(Subspace::assemble(y.ambient_dim, basis, kernel))
}

/// Closed ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vector,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("ball radius must be finite and ≥ 0, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, space: &NormSpec, x: &Vector, tol: f64) -> bool {
        space.dist(x.coords(), self.center.coords()) <= self.radius + tol
    }
}

/// Best approximation of a point from a subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nearest {
    pub distance: f64,
    pub point: Vector,
    pub path: SolvePath,
    pub converged: bool,
}

/// `min_{y ∈ Y} ‖x − y‖` and a minimiser.
pub fn dist_to_subspace(space: &NormSpec, x: &Vector, y: &Subspace) -> Result<Nearest> {
    let n = space.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.dim() });
    }
    if y.ambient_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y.ambient_dim() });
    }
    if y.dim() == 0 {
        return Ok(Nearest { distance: space.norm(x.coords()), point: Vector::zeros(n), path: SolvePath::Exact, converged: true });
    }
    if y.is_whole() || y.residual(x.coords()) == 0.0 {
        return Ok(Nearest { distance: 0.0, point: x.clone(), path: SolvePath::Exact, converged: true });
    }
    if let NormSpec::Lp { p, .. } = space {
        if *p == 2.0 {
            let proj = y.project(x);
            return Ok(Nearest { distance: space.dist(x.coords(), proj.coords()), point: proj, path: SolvePath::Exact, converged: true });
        }
    }
    if space.is_polyhedral() {
        let mut lp = LpBuilder::new();
        let c = lp.add_vars(y.dim());
        let zero = vec![0.0; n];
        let diff: Vec<AffineExpr> = y
            .affine_point(&c, &zero)
            .into_iter()
            .zip(x.coords())
            .map(|(e, &xi)| e.scaled(-1.0).plus(&AffineExpr::constant(xi)))
            .collect();
        let t = add_epigraph(space, &mut lp, &diff).expect("polyhedral");
        lp.set_objective(&AffineExpr::var(t));
        let out = lp_solve(&lp.build())?;
        let u = out.point.ok_or_else(|| Error::Optimization(format!("distance LP ended {:?}", out.status)))?;
        let coords: Vec<f64> = c.iter().map(|&v| u[v]).collect();
        let point = y.point(&coords);
        return Ok(Nearest { distance: space.dist(x.coords(), point.coords()), point, path: SolvePath::Lp, converged: true });
    }
    let start = y.coords_of(x.coords());
    let scale = y.residual(x.coords()).max(1e-3);
    let objective = |c: &[f64]| {
        let v = y.point(c);
        let d = linalg::sub(x.coords(), v.coords());
        let g = space.subgradient(&d);
        // ∂/∂c ‖x − Bc‖ = −Bᵀg
        let grad: Vec<f64> = y.basis().iter().map(|b| -linalg::dot(b.coords(), &g)).collect();
        (space.norm(&d), grad)
    };
    let out = subgradient_minimize(objective, |_| {}, &start, &SubgradientConfig::default().with_scale(scale));
    let point = y.point(&out.point);
    Ok(Nearest { distance: out.value, point, path: SolvePath::Subgradient, converged: out.converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_in_r3_and_its_kernel() {
        let y1 = Subspace::from_basis(3, &[Vector::from([1.0, 0.0, -1.0])]).unwrap();
        assert_eq!(y1.dim(), 1);
        assert_eq!(y1.kernel().len(), 2);
        for k in y1.kernel() {
            assert!(k.apply(&[1.0, 0.0, -1.0]).abs() < 1e-12);
        }
        // The kernel spans the annihilator {(1,0,1)*, (0,1,0)*}.
        let ann = Subspace::from_basis(3, &[Vector::from([1.0, 0.0, 1.0]), Vector::from([0.0, 1.0, 0.0])]).unwrap();
        for k in y1.kernel() {
            assert!(ann.contains(&Vector::new(k.0.clone()).unwrap(), 1e-12));
        }
    }

    #[test]
    fn empty_basis_is_the_zero_subspace() {
        let z = Subspace::from_basis(3, &[]).unwrap();
        assert_eq!(z.dim(), 0);
        assert_eq!(z.kernel().len(), 3);
    }

    #[test]
    fn dependent_inputs_are_rejected() {
        let err = Subspace::from_basis(2, &[Vector::from([1.0, 1.0]), Vector::from([-2.0, -2.0])]).unwrap_err();
        assert!(matches!(err, Error::DependentSet { index: 1 }));
        let err = Subspace::from_kernel(2, &[LinearFunctional(vec![0.0, 0.0])]).unwrap_err();
        assert!(matches!(err, Error::DependentSet { index: 0 }));
        assert!(Subspace::from_basis(3, &[Vector::from([1.0, 1.0])]).is_err());
    }

    #[test]
    fn sum_of_example_lines_is_the_zero_sum_plane() {
        let y1 = Subspace::from_basis(3, &[Vector::from([1.0, 0.0, -1.0])]).unwrap();
        let y2 = Subspace::from_basis(3, &[Vector::from([0.0, 1.0, -1.0])]).unwrap();
        let s = sum_subspaces(&y1, &y2).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&Vector::from([2.0, -5.0, 3.0]), 1e-12));
        assert!(!s.contains(&Vector::from([1.0, 1.0, 1.0]), 1e-6));
        assert_eq!(sum_subspaces(&y1, &y1).unwrap().dim(), 1);
    }

    #[test]
    fn json_forms() {
        let s: Subspace = serde_json::from_str(r#"{"kernel":[[1,1,1]]}"#).unwrap();
        assert_eq!(s.dim(), 2);
        let z: Subspace = serde_json::from_str(r#"{"dim":4,"basis":[]}"#).unwrap();
        assert_eq!((z.ambient_dim(), z.dim()), (4, 0));
        assert!(serde_json::from_str::<Subspace>(r#"{"basis":[]}"#).is_err());
        let back: Subspace = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert!(back.is_subspace_of(&s, 1e-12) && s.is_subspace_of(&back, 1e-12));
    }

    #[test]
    fn distance_in_l1_to_coordinate_span() {
        let n = 6;
        for k in 1..n {
            let y = Subspace::coordinate(n, &(0..k).collect::<Vec<_>>()).unwrap();
            let d = dist_to_subspace(&NormSpec::l1(n), &Vector::unit(n, k), &y).unwrap();
            assert!((d.distance - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn point_in_subspace_has_distance_zero() {
        let y = Subspace::from_kernel(3, &[LinearFunctional(vec![1.0, 1.0, 1.0])]).unwrap();
        let x = Vector::from([1.0, 2.0, -3.0]);
        for space in [NormSpec::linf(3), NormSpec::lp(3.0, 3).unwrap()] {
            let d = dist_to_subspace(&space, &x, &y).unwrap();
            assert!(d.distance < 1e-9, "{space:?} {}", d.distance);
        }
    }

    #[test]
    fn intersection_of_planes() {
        let a = Subspace::from_kernel(3, &[LinearFunctional(vec![1.0, 0.0, 0.0])]).unwrap();
        let b = Subspace::from_kernel(3, &[LinearFunctional(vec![0.0, 1.0, 0.0])]).unwrap();
        let i = a.intersection(&b).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&Vector::from([0.0, 0.0, 5.0]), 1e-12));
    }
}
