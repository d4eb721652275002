//! Finite-dimensional normed spaces.
//!
//! A [`NormSpec`] is one of
//!
//! * `Polyhedral`: `‖x‖ = max_g g(x)` over a symmetric generator set,
//! * `Lp`: the usual `p`-norm, `1 ≤ p ≤ ∞`,
//! * `DirectSum`: `‖x‖ = π(‖x(1)‖, …, ‖x(k)‖)` with `π` a monotone
//!   polyhedral norm on the nonnegative orthant,
//! * `Esum`: the same composition with an arbitrary monotone outer norm
//!   (polyhedral or weighted `ℓ_p`), the finite truncation of an E-sum.
//!
//! Every variant whose building blocks are polyhedral (including `ℓ₁` and
//! `ℓ∞`) has an exact linear-programming encoding, see
//! [`NormSpec::is_polyhedral`].

use std::fmt;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{Error, Result};

mod epigraph;
mod subspace;

pub(crate) use epigraph::add_epigraph;
pub use subspace::{dist_to_subspace, subspace_from_basis, subspace_from_kernel, sum_subspaces, Ball, Nearest, Subspace};

/// A point of `ℝⁿ` with finite coordinates.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Vector(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    /// The `i`-th unit vector (0-based) of `ℝⁿ`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(linalg::sub(&self.0, &other.0))
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    /// Concatenation of blocks, as in a direct sum.
    pub fn concat(blocks: &[Vector]) -> Vector {
        Vector(blocks.iter().flat_map(|b| b.0.iter().copied()).collect())
    }

    pub fn block(&self, r: Range<usize>) -> Vector {
        Vector(self.0[r].to_vec())
    }

    pub(crate) fn from_raw(v: Vec<f64>) -> Vector {
        debug_assert!(v.iter().all(|x| x.is_finite()));
        Vector(v)
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    /// Panics on non-finite input.
    fn from(a: [f64; N]) -> Self {
        Vector::new(a.to_vec()).expect("finite coordinates")
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// A linear functional acting by the dot product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearFunctional(pub Vec<f64>);

impl LinearFunctional {
    pub fn apply(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.0, x)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn negated(&self) -> LinearFunctional {
        LinearFunctional(self.0.iter().map(|c| -c).collect())
    }
}

/// `π(t) = max_j g_j(t)` on `ℝᵏ_{≥0}` with every `g_j` nonnegative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonePolyhedralNorm {
    pub generators: Vec<LinearFunctional>,
}

impl MonotonePolyhedralNorm {
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        let pi = MonotonePolyhedralNorm { generators: generators.into_iter().map(LinearFunctional).collect() };
        let report = pi.validate(0, 0);
        if report.is_ok() {
            Ok(pi)
        } else {
            Err(Error::InvalidNorm(format!("{:?}", report.violations)))
        }
    }

    /// `π = max` of the coordinates (the `ℓ∞` sum).
    pub fn max(k: usize) -> Self {
        MonotonePolyhedralNorm { generators: (0..k).map(|i| LinearFunctional(Vector::unit(k, i).0)).collect() }
    }

    /// `π = sum` of the coordinates (the `ℓ₁` sum).
    pub fn sum(k: usize) -> Self {
        MonotonePolyhedralNorm { generators: vec![LinearFunctional(vec![1.0; k])] }
    }

    pub fn dim(&self) -> usize {
        self.generators.first().map_or(0, |g| g.dim())
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        self.generators.iter().map(|g| g.apply(t)).fold(0.0, f64::max)
    }

    fn active(&self, t: &[f64]) -> &LinearFunctional {
        let mut best = &self.generators[0];
        let mut val = best.apply(t);
        for g in &self.generators[1..] {
            let v = g.apply(t);
            if v > val {
                val = v;
                best = g;
            }
        }
        best
    }

    /// Structural checks (nonnegative coefficients, every coordinate
    /// covered) plus `samples` seeded monotonicity probes on the orthant.
    pub fn validate(&self, samples: usize, seed: u64) -> NormReport {
        let mut v = Vec::new();
        let k = self.dim();
        if self.generators.is_empty() || k == 0 {
            v.push(NormViolation::new("pi", Issue::Empty));
            return NormReport { violations: v, samples: 0, seed };
        }
        for (j, g) in self.generators.iter().enumerate() {
            if g.dim() != k {
                v.push(NormViolation::new("pi", Issue::DimensionMismatch { expected: k, found: g.dim() }));
                continue;
            }
            if g.0.iter().any(|c| !c.is_finite()) {
                v.push(NormViolation::new("pi", Issue::NonFinite));
            }
            for (i, &c) in g.0.iter().enumerate() {
                if c < 0.0 {
                    v.push(NormViolation::new("pi", Issue::NegativeCoefficient { generator: j, coordinate: i }));
                }
            }
        }
        if !v.is_empty() {
            return NormReport { violations: v, samples: 0, seed };
        }
        for i in 0..k {
            if !self.generators.iter().any(|g| g.0[i] > 0.0) {
                v.push(NormViolation::new("pi", Issue::UncoveredCoordinate { coordinate: i }));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let lo: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..2.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|&x| x + rng.gen_range(0.0..1.0)).collect();
            if self.eval(&lo) > self.eval(&hi) * (1.0 + 1e-12) {
                v.push(NormViolation::new("pi", Issue::Monotonicity { lower: lo, upper: hi }));
                break;
            }
        }
        NormReport { violations: v, samples, seed }
    }
}

/// Outer norm of an E-sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ENorm {
    Monotone(MonotonePolyhedralNorm),
    /// `(Σ w_i t_iᵖ)^{1/p}`, or `max w_i t_i` for `p = ∞`.
    WeightedLp {
        #[serde(with = "exponent")]
        p: f64,
        weights: Vec<f64>,
    },
}

impl ENorm {
    pub fn dim(&self) -> usize {
        match self {
            ENorm::Monotone(pi) => pi.dim(),
            ENorm::WeightedLp { weights, .. } => weights.len(),
        }
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        match self {
            ENorm::Monotone(pi) => pi.eval(t),
            ENorm::WeightedLp { p, weights } => weighted_lp(*p, weights, t),
        }
    }

    /// A nonnegative (super)gradient of the outer norm at `t ≥ 0`.
    fn gradient(&self, t: &[f64]) -> Vec<f64> {
        match self {
            ENorm::Monotone(pi) => pi.active(t).0.clone(),
            ENorm::WeightedLp { p, weights } => {
                let p = *p;
                if p == 1.0 {
                    return weights.clone();
                }
                if p.is_infinite() {
                    let (i, _) = argmax(&t.iter().zip(weights).map(|(a, w)| a * w).collect::<Vec<_>>());
                    let mut g = vec![0.0; t.len()];
                    g[i] = weights[i];
                    return g;
                }
                let n = weighted_lp(p, weights, t);
                if n == 0.0 {
                    return vec![0.0; t.len()];
                }
                t.iter().zip(weights).map(|(&a, &w)| w * (a / n).powf(p - 1.0)).collect()
            }
        }
    }

    /// The generator form when the outer norm is polyhedral.
    fn monotone_generators(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            ENorm::Monotone(pi) => Some(pi.generators.iter().map(|g| g.0.clone()).collect()),
            ENorm::WeightedLp { p, weights } if *p == 1.0 => Some(vec![weights.clone()]),
            ENorm::WeightedLp { p, weights } if p.is_infinite() => Some(
                (0..weights.len())
                    .map(|i| {
                        let mut g = vec![0.0; weights.len()];
                        g[i] = weights[i];
                        g
                    })
                    .collect(),
            ),
            ENorm::WeightedLp { .. } => None,
        }
    }

    pub fn validate(&self, samples: usize, seed: u64) -> NormReport {
        match self {
            ENorm::Monotone(pi) => pi.validate(samples, seed),
            ENorm::WeightedLp { p, weights } => {
                let mut v = Vec::new();
                if !(*p >= 1.0) {
                    v.push(NormViolation::new("e_norm", Issue::BadExponent { p: *p }));
                }
                if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    v.push(NormViolation::new("e_norm", Issue::BadWeights));
                }
                NormReport { violations: v, samples, seed }
            }
        }
    }
}

impl From<MonotonePolyhedralNorm> for ENorm {
    fn from(pi: MonotonePolyhedralNorm) -> Self {
        ENorm::Monotone(pi)
    }
}

/// A norm on `ℝⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormSpec {
    Polyhedral {
        generators: Vec<LinearFunctional>,
    },
    Lp {
        #[serde(with = "exponent")]
        p: f64,
        dim: usize,
    },
    DirectSum {
        components: Vec<NormSpec>,
        pi: MonotonePolyhedralNorm,
    },
    Esum {
        components: Vec<NormSpec>,
        e_norm: ENorm,
    },
}

impl NormSpec {
    /// Polyhedral norm from generators; missing negations are added (with a
    /// warning) and exact duplicates removed.
    pub fn polyhedral(generators: Vec<Vec<f64>>) -> Result<Self> {
        let n = generators.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::InvalidNorm("polyhedral norm needs at least one generator".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: g.len() });
        }
        let spec = NormSpec::Polyhedral { generators: symmetrize(generators.into_iter().map(LinearFunctional).collect()) };
        let report = spec.validate_with(0, 0);
        if report.is_ok() {
            Ok(spec)
        } else {
            Err(Error::InvalidNorm(format!("{:?}", report.violations)))
        }
    }

    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        if !(p >= 1.0) || dim == 0 {
            return Err(Error::InvalidNorm(format!("ℓ_p needs p ≥ 1 and dim ≥ 1 (p = {p}, dim = {dim})")));
        }
        Ok(NormSpec::Lp { p, dim })
    }

    pub fn l1(dim: usize) -> Self {
        NormSpec::Lp { p: 1.0, dim }
    }

    pub fn l2(dim: usize) -> Self {
        NormSpec::Lp { p: 2.0, dim }
    }

    pub fn linf(dim: usize) -> Self {
        NormSpec::Lp { p: f64::INFINITY, dim }
    }

    /// Parse from JSON, symmetrising polyhedral generator sets.
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: NormSpec = serde_json::from_str(s)?;
        Ok(spec.canonicalize())
    }

    /// Symmetrise every polyhedral generator set in the tree.
    pub fn canonicalize(self) -> Self {
        match self {
            NormSpec::Polyhedral { generators } => NormSpec::Polyhedral { generators: symmetrize(generators) },
            NormSpec::DirectSum { components, pi } => {
                NormSpec::DirectSum { components: components.into_iter().map(Self::canonicalize).collect(), pi }
            }
            NormSpec::Esum { components, e_norm } => {
                NormSpec::Esum { components: components.into_iter().map(Self::canonicalize).collect(), e_norm }
            }
            other => other,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            NormSpec::Polyhedral { generators } => generators.first().map_or(0, |g| g.dim()),
            NormSpec::Lp { dim, .. } => *dim,
            NormSpec::DirectSum { components, .. } | NormSpec::Esum { components, .. } => {
                components.iter().map(NormSpec::dim).sum()
            }
        }
    }

    /// Component blocks of a sum space; a single block otherwise.
    pub fn blocks(&self) -> Vec<Range<usize>> {
        match self {
            NormSpec::DirectSum { components, .. } | NormSpec::Esum { components, .. } => {
                let mut start = 0;
                components
                    .iter()
                    .map(|c| {
                        let r = start..start + c.dim();
                        start = r.end;
                        r
                    })
                    .collect()
            }
            #[allow(clippy::single_range_in_vec_init)]
            _ => vec![0..self.dim()],
        }
    }

    pub fn components(&self) -> Option<&[NormSpec]> {
        match self {
            NormSpec::DirectSum { components, .. } | NormSpec::Esum { components, .. } => Some(components),
            _ => None,
        }
    }

    /// Whether the norm has an exact LP encoding.
    pub fn is_polyhedral(&self) -> bool {
        match self {
            NormSpec::Polyhedral { .. } => true,
            NormSpec::Lp { p, .. } => *p == 1.0 || p.is_infinite(),
            NormSpec::DirectSum { components, .. } => components.iter().all(NormSpec::is_polyhedral),
            NormSpec::Esum { components, e_norm } => {
                e_norm.monotone_generators().is_some() && components.iter().all(NormSpec::is_polyhedral)
            }
        }
    }

    /// Evaluate `‖x‖`, checking the dimension.
    pub fn eval(&self, x: &Vector) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        Ok(self.norm(x.coords()))
    }

    /// Evaluate `‖x‖` on a raw slice. The length must match [`Self::dim`].
    pub fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            NormSpec::Polyhedral { generators } => generators.iter().map(|g| g.apply(x)).fold(0.0, f64::max),
            NormSpec::Lp { p, .. } => lp_norm(*p, x),
            NormSpec::DirectSum { components, pi } => pi.eval(&self.component_norms(components, x)),
            NormSpec::Esum { components, e_norm } => e_norm.eval(&self.component_norms(components, x)),
        }
    }

    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        self.norm(&linalg::sub(a, b))
    }

    fn component_norms(&self, components: &[NormSpec], x: &[f64]) -> Vec<f64> {
        components.iter().zip(self.blocks()).map(|(c, r)| c.norm(&x[r])).collect()
    }

    /// A subgradient of the norm at `x` (the zero vector at the origin).
    pub fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        match self {
            NormSpec::Polyhedral { generators } => {
                let vals: Vec<f64> = generators.iter().map(|g| g.apply(x)).collect();
                let (i, v) = argmax(&vals);
                if v <= 0.0 {
                    vec![0.0; n]
                } else {
                    generators[i].0.clone()
                }
            }
            NormSpec::Lp { p, .. } => lp_subgradient(*p, x),
            NormSpec::DirectSum { components, pi } => {
                let outer = ENorm::Monotone(pi.clone());
                self.sum_subgradient(components, &outer, x)
            }
            NormSpec::Esum { components, e_norm } => self.sum_subgradient(components, e_norm, x),
        }
    }

    fn sum_subgradient(&self, components: &[NormSpec], outer: &ENorm, x: &[f64]) -> Vec<f64> {
        let t = self.component_norms(components, x);
        let w = outer.gradient(&t);
        let mut g = vec![0.0; x.len()];
        for ((c, r), wi) in components.iter().zip(self.blocks()).zip(w) {
            if wi != 0.0 {
                let sub = c.subgradient(&x[r.clone()]);
                for (gi, si) in g[r].iter_mut().zip(sub) {
                    *gi = wi * si;
                }
            }
        }
        g
    }

    /// Every linear functional whose maximum is the norm, when the norm is
    /// polyhedral and the list has at most `cap` members.
    pub fn explicit_generators(&self, cap: usize) -> Option<Vec<Vec<f64>>> {
        match self {
            NormSpec::Polyhedral { generators } => {
                (generators.len() <= cap).then(|| generators.iter().map(|g| g.0.clone()).collect())
            }
            NormSpec::Lp { p, dim } if p.is_infinite() => (2 * dim <= cap).then(|| {
                (0..*dim)
                    .flat_map(|i| {
                        let e = Vector::unit(*dim, i).0;
                        let ne: Vec<f64> = e.iter().map(|c| -c).collect();
                        [e, ne]
                    })
                    .collect()
            }),
            NormSpec::Lp { p, dim } if *p == 1.0 => {
                if *dim >= 32 || (1usize << dim) > cap {
                    return None;
                }
                Some(
                    (0..1usize << dim)
                        .map(|mask| (0..*dim).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
                        .collect(),
                )
            }
            NormSpec::Lp { .. } => None,
            NormSpec::DirectSum { components, pi } => {
                let outer = pi.generators.iter().map(|g| g.0.clone()).collect::<Vec<_>>();
                self.sum_generators(components, &outer, cap)
            }
            NormSpec::Esum { components, e_norm } => {
                let outer = e_norm.monotone_generators()?;
                self.sum_generators(components, &outer, cap)
            }
        }
    }

    fn sum_generators(&self, components: &[NormSpec], outer: &[Vec<f64>], cap: usize) -> Option<Vec<Vec<f64>>> {
        let inner: Vec<Vec<Vec<f64>>> =
            components.iter().map(|c| c.explicit_generators(cap)).collect::<Option<_>>()?;
        let blocks = self.blocks();
        let n = self.dim();
        let mut out: Vec<Vec<f64>> = Vec::new();
        for g in outer {
            // Cartesian product over components with positive weight.
            let mut partial: Vec<Vec<f64>> = vec![vec![0.0; n]];
            for (i, r) in blocks.iter().enumerate() {
                if g[i] == 0.0 {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * inner[i].len());
                for base in &partial {
                    for h in &inner[i] {
                        let mut v = base.clone();
                        for (vj, hj) in v[r.clone()].iter_mut().zip(h) {
                            *vj = g[i] * hj;
                        }
                        next.push(v);
                    }
                }
                if out.len() + next.len() > cap {
                    return None;
                }
                partial = next;
            }
            out.extend(partial);
        }
        Some(symmetrize(out.into_iter().map(LinearFunctional).collect()).into_iter().map(|g| g.0).collect())
    }

    /// Structural checks plus 256 seeded triangle/homogeneity probes.
    pub fn validate(&self) -> NormReport {
        self.validate_with(256, 0)
    }

    /// Structural checks plus `samples` seeded axiom probes.
    pub fn validate_with(&self, samples: usize, seed: u64) -> NormReport {
        let mut violations = Vec::new();
        self.structural(&mut violations, "norm");
        if violations.is_empty() && samples > 0 {
            self.sampled_axioms(samples, seed, &mut violations);
        }
        NormReport { violations, samples, seed }
    }

    fn structural(&self, v: &mut Vec<NormViolation>, at: &str) {
        match self {
            NormSpec::Polyhedral { generators } => {
                let n = self.dim();
                if n == 0 {
                    v.push(NormViolation::new(at, Issue::Empty));
                    return;
                }
                for g in generators {
                    if g.dim() != n {
                        v.push(NormViolation::new(at, Issue::DimensionMismatch { expected: n, found: g.dim() }));
                        return;
                    }
                    if g.0.iter().any(|c| !c.is_finite()) {
                        v.push(NormViolation::new(at, Issue::NonFinite));
                        return;
                    }
                }
                for g in generators {
                    let neg = g.negated();
                    if !generators.contains(&neg) {
                        v.push(NormViolation::new(at, Issue::Asymmetric { generator: g.0.clone() }));
                    }
                }
                let rows: Vec<Vec<f64>> = generators.iter().map(|g| g.0.clone()).collect();
                if linalg::rank(&rows, 1e-10) < n {
                    let span = linalg::span_basis(&rows, 1e-10);
                    let witness = linalg::orth_complement(&span, n).into_iter().next().unwrap_or_default();
                    v.push(NormViolation::new(at, Issue::NotDefinite { witness }));
                }
            }
            NormSpec::Lp { p, dim } => {
                if !(*p >= 1.0) {
                    v.push(NormViolation::new(at, Issue::BadExponent { p: *p }));
                }
                if *dim == 0 {
                    v.push(NormViolation::new(at, Issue::Empty));
                }
            }
            NormSpec::DirectSum { components, pi } => {
                self.check_sum(components, pi.dim(), v, at);
                v.extend(pi.validate(0, 0).violations);
            }
            NormSpec::Esum { components, e_norm } => {
                self.check_sum(components, e_norm.dim(), v, at);
                v.extend(e_norm.validate(0, 0).violations);
            }
        }
    }

    fn check_sum(&self, components: &[NormSpec], outer_dim: usize, v: &mut Vec<NormViolation>, at: &str) {
        if components.is_empty() {
            v.push(NormViolation::new(at, Issue::Empty));
        }
        if outer_dim != components.len() {
            v.push(NormViolation::new(at, Issue::DimensionMismatch { expected: components.len(), found: outer_dim }));
        }
        for (i, c) in components.iter().enumerate() {
            c.structural(v, &format!("{at}.components[{i}]"));
        }
    }

    fn sampled_axioms(&self, samples: usize, seed: u64, v: &mut Vec<NormViolation>) {
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let s = 10f64.powf(rng.gen_range(-2.0..2.0));
            (0..n).map(|_| s * rng.gen_range(-1.0..1.0)).collect()
        };
        for _ in 0..samples {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let c: f64 = rng.gen_range(-5.0..5.0);
            let (nx, ny) = (self.norm(&x), self.norm(&y));
            let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let lhs = self.norm(&sum);
            if lhs > (nx + ny) * (1.0 + 1e-9) {
                v.push(NormViolation::new("norm", Issue::Triangle { x, y, lhs, rhs: nx + ny }));
                return;
            }
            let cx: Vec<f64> = x.iter().map(|a| c * a).collect();
            let ncx = self.norm(&cx);
            if (ncx - c.abs() * nx).abs() > 1e-9 * c.abs() * nx {
                v.push(NormViolation::new("norm", Issue::Homogeneity { x, scale: c, lhs: ncx, rhs: c.abs() * nx }));
                return;
            }
        }
    }
}

/// `validate_norm`: structural checks plus seeded axiom sampling.
pub fn validate_norm(space: &NormSpec, samples: usize, seed: u64) -> NormReport {
    space.validate_with(samples, seed)
}

/// Polyhedral direct sum `(⊕ X_i)_π`.
pub fn make_direct_sum(components: Vec<NormSpec>, pi: MonotonePolyhedralNorm) -> Result<NormSpec> {
    if pi.dim() != components.len() {
        return Err(Error::DimensionMismatch { expected: components.len(), found: pi.dim() });
    }
    let report = pi.validate(64, 0);
    if !report.is_ok() {
        return Err(Error::InvalidNorm(format!("π: {:?}", report.violations)));
    }
    check_components(&components)?;
    Ok(NormSpec::DirectSum { components, pi })
}

/// Finite E-sum `(Σ ⊕ X_n)_E`.
pub fn make_esum(components: Vec<NormSpec>, e_norm: ENorm) -> Result<NormSpec> {
    if e_norm.dim() != components.len() {
        return Err(Error::DimensionMismatch { expected: components.len(), found: e_norm.dim() });
    }
    let report = e_norm.validate(64, 0);
    if !report.is_ok() {
        return Err(Error::InvalidNorm(format!("E-norm: {:?}", report.violations)));
    }
    check_components(&components)?;
    Ok(NormSpec::Esum { components, e_norm })
}

fn check_components(components: &[NormSpec]) -> Result<()> {
    for c in components {
        let r = c.validate_with(0, 0);
        if !r.is_ok() {
            return Err(Error::InvalidNorm(format!("component: {:?}", r.violations)));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub violations: Vec<NormViolation>,
    pub samples: usize,
    pub seed: u64,
}

impl NormReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormViolation {
    /// Where in the norm tree the problem sits.
    pub location: String,
    pub issue: Issue,
}

impl NormViolation {
    fn new(location: &str, issue: Issue) -> Self {
        NormViolation { location: location.to_string(), issue }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    Empty,
    NonFinite,
    DimensionMismatch { expected: usize, found: usize },
    Asymmetric { generator: Vec<f64> },
    NotDefinite { witness: Vec<f64> },
    NegativeCoefficient { generator: usize, coordinate: usize },
    UncoveredCoordinate { coordinate: usize },
    BadExponent { p: f64 },
    BadWeights,
    Monotonicity { lower: Vec<f64>, upper: Vec<f64> },
    Triangle { x: Vec<f64>, y: Vec<f64>, lhs: f64, rhs: f64 },
    Homogeneity { x: Vec<f64>, scale: f64, lhs: f64, rhs: f64 },
}

fn symmetrize(generators: Vec<LinearFunctional>) -> Vec<LinearFunctional> {
    let mut out: Vec<LinearFunctional> = Vec::with_capacity(generators.len() * 2);
    let mut added = 0;
    for g in &generators {
        if !out.contains(g) {
            out.push(g.clone());
        }
    }
    for g in &generators {
        let neg = g.negated();
        if !out.contains(&neg) {
            out.push(neg);
            added += 1;
        }
    }
    if added > 0 {
        log::warn!("polyhedral generator set was not symmetric; added {added} negated generators");
    }
    out
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc })
}

pub(crate) fn lp_norm(p: f64, x: &[f64]) -> f64 {
    if p == 1.0 {
        x.iter().map(|a| a.abs()).sum()
    } else if p.is_infinite() {
        linalg::max_abs(x)
    } else {
        let m = linalg::max_abs(x);
        if m == 0.0 {
            return 0.0;
        }
        if p == 2.0 {
            return m * x.iter().map(|a| (a / m) * (a / m)).sum::<f64>().sqrt();
        }
        m * x.iter().map(|a| (a.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn lp_subgradient(p: f64, x: &[f64]) -> Vec<f64> {
    let n = lp_norm(p, x);
    if n == 0.0 {
        return vec![0.0; x.len()];
    }
    if p == 1.0 {
        x.iter().map(|a| if *a == 0.0 { 0.0 } else { a.signum() }).collect()
    } else if p.is_infinite() {
        let (i, _) = argmax(&x.iter().map(|a| a.abs()).collect::<Vec<_>>());
        let mut g = vec![0.0; x.len()];
        g[i] = x[i].signum();
        g
    } else {
        x.iter().map(|a| a.signum() * (a.abs() / n).powf(p - 1.0)).collect()
    }
}

fn weighted_lp(p: f64, w: &[f64], t: &[f64]) -> f64 {
    if p.is_infinite() {
        t.iter().zip(w).map(|(a, w)| w * a.abs()).fold(0.0, f64::max)
    } else if p == 1.0 {
        t.iter().zip(w).map(|(a, w)| w * a.abs()).sum()
    } else {
        let m = linalg::max_abs(t);
        if m == 0.0 {
            return 0.0;
        }
        m * t.iter().zip(w).map(|(a, w)| w * (a.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Serialises `∞` as the string `"inf"`; accepts numbers or `"inf"`.
mod exponent {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(p),
            Raw::Str(s) => match s.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
                other => other.parse().map_err(de::Error::custom),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linf_of_example_vector() {
        let x = Vector::from([1.5, -1.5, -1.5]);
        assert_eq!(NormSpec::linf(3).eval(&x).unwrap(), 1.5);
    }

    #[test]
    fn zero_vector_has_zero_norm_in_every_variant() {
        let specs = [
            NormSpec::l1(3),
            NormSpec::l2(3),
            NormSpec::lp(3.5, 3).unwrap(),
            NormSpec::linf(3),
            NormSpec::polyhedral(vec![vec![1.0, 2.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 0.0, -1.0]]).unwrap(),
            make_direct_sum(vec![NormSpec::l1(1), NormSpec::l2(2)], MonotonePolyhedralNorm::sum(2)).unwrap(),
        ];
        for s in &specs {
            assert_eq!(s.eval(&Vector::zeros(3)).unwrap(), 0.0, "{s:?}");
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(NormSpec::l1(2).eval(&Vector::zeros(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn coordinate_generators_give_linf() {
        let g: Vec<Vec<f64>> = (0..3).map(|i| Vector::unit(3, i).0).collect();
        let spec = NormSpec::polyhedral(g).unwrap();
        assert!(spec.validate().is_ok());
        assert_eq!(spec.norm(&[0.5, -2.0, 1.0]), 2.0);
    }

    #[test]
    fn degenerate_generators_are_not_definite() {
        let spec = NormSpec::Polyhedral { generators: vec![LinearFunctional(vec![1.0, 0.0]), LinearFunctional(vec![-1.0, 0.0])] };
        let report = spec.validate();
        let witness = report
            .violations
            .iter()
            .find_map(|v| match &v.issue {
                Issue::NotDefinite { witness } => Some(witness.clone()),
                _ => None,
            })
            .expect("definiteness failure");
        assert!(witness[0].abs() < 1e-12 && (witness[1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_generators_are_reported_and_symmetrised() {
        let raw = NormSpec::Polyhedral {
            generators: vec![LinearFunctional(vec![1.0, 0.0]), LinearFunctional(vec![0.0, 1.0])],
        };
        assert!(raw.validate().violations.iter().any(|v| matches!(v.issue, Issue::Asymmetric { .. })));
        let fixed = raw.canonicalize();
        assert!(fixed.validate().is_ok());
        assert_eq!(fixed.norm(&[-3.0, 1.0]), 3.0);
    }

    #[test]
    fn direct_sum_of_two_l1_planes() {
        let spec = make_direct_sum(vec![NormSpec::l1(2), NormSpec::l1(2)], MonotonePolyhedralNorm::max(2)).unwrap();
        assert_eq!(spec.norm(&[1.0, 0.0, 0.0, -2.0]), 2.0);
        let sum = make_esum(vec![NormSpec::l1(2), NormSpec::l1(2)], ENorm::WeightedLp { p: 1.0, weights: vec![1.0, 1.0] })
            .unwrap();
        assert_eq!(sum.norm(&[1.0, 0.0, 0.0, -2.0]), 3.0);
    }

    #[test]
    fn direct_sum_rejects_bad_pi() {
        let pi = MonotonePolyhedralNorm { generators: vec![LinearFunctional(vec![1.0, -1.0])] };
        assert!(make_direct_sum(vec![NormSpec::l1(1), NormSpec::l1(1)], pi).is_err());
        assert!(make_direct_sum(vec![NormSpec::l1(1)], MonotonePolyhedralNorm::max(2)).is_err());
        let uncovered = MonotonePolyhedralNorm { generators: vec![LinearFunctional(vec![1.0, 0.0])] };
        assert!(uncovered.validate(0, 0).violations.iter().any(|v| matches!(v.issue, Issue::UncoveredCoordinate { coordinate: 1 })));
    }

    #[test]
    fn explicit_generators_reproduce_the_norm() {
        let spec = make_direct_sum(vec![NormSpec::l1(2), NormSpec::linf(2)], MonotonePolyhedralNorm::sum(2)).unwrap();
        let gens = spec.explicit_generators(1000).unwrap();
        let x = [0.3, -1.2, 2.0, 0.5];
        let via_gens = gens.iter().map(|g| linalg::dot(g, &x)).fold(f64::MIN, f64::max);
        assert!((via_gens - spec.norm(&x)).abs() < 1e-12);
        assert!(NormSpec::l2(2).explicit_generators(1000).is_none());
    }

    #[test]
    fn json_roundtrip_with_infinite_exponent() {
        let spec = NormSpec::Esum {
            components: vec![NormSpec::linf(2), NormSpec::polyhedral(vec![vec![1.0]]).unwrap()],
            e_norm: ENorm::WeightedLp { p: f64::INFINITY, weights: vec![1.0, 2.0] },
        };
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"kind\":\"esum\"") && s.contains("\"inf\""));
        assert_eq!(NormSpec::from_json(&s).unwrap(), spec);
        let parsed = NormSpec::from_json(r#"{"kind":"polyhedral","generators":[[1,0],[0,1]]}"#).unwrap();
        assert!(parsed.validate().is_ok());
    }

    #[test]
    fn subgradient_is_supporting() {
        let spec = make_direct_sum(vec![NormSpec::l2(2), NormSpec::l1(1)], MonotonePolyhedralNorm::sum(2)).unwrap();
        let x = [1.0, 2.0, -3.0];
        let g = spec.subgradient(&x);
        assert!((linalg::dot(&g, &x) - spec.norm(&x)).abs() < 1e-12);
        let y = [0.5, -1.0, 4.0];
        assert!(linalg::dot(&g, &y) <= spec.norm(&y) + 1e-12);
    }
}
