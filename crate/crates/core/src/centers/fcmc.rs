//! Convex, monotone, coercive scalarisations `f : ℝ₊ᴺ → ℝ₊`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::norm::lp_norm;
use crate::opt::{AffineExpr, LpBuilder};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FcmcFunction {
    /// `max_i ρ_i t_i`, the weighted Chebyshev radius.
    WeightedMax { weights: Vec<f64> },
    /// `max_i t_i / ρ_i`, the other common weighting convention.
    InverseWeightedMax { weights: Vec<f64> },
    /// `Σ_i w_i t_i`.
    WeightedSum { weights: Vec<f64> },
    /// `(Σ_i w_i t_iᵖ)^{1/p}`; `p = ∞` is [`FcmcFunction::WeightedMax`].
    PowerSum { p: f64, weights: Vec<f64> },
    /// `(Σ_k c_k f_k(t))^power` with `c_k > 0` and `power ≥ 1`.
    Composite { parts: Vec<CompositePart>, power: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositePart {
    pub coef: f64,
    pub f: FcmcFunction,
}

impl FcmcFunction {
    /// Plain `max_i t_i` over `n` distances.
    pub fn max(n: usize) -> Self {
        FcmcFunction::WeightedMax { weights: vec![1.0; n] }
    }

    pub fn sum(n: usize) -> Self {
        FcmcFunction::WeightedSum { weights: vec![1.0; n] }
    }

    /// Number of distances the function takes.
    pub fn arity(&self) -> usize {
        match self {
            FcmcFunction::WeightedMax { weights }
            | FcmcFunction::InverseWeightedMax { weights }
            | FcmcFunction::WeightedSum { weights }
            | FcmcFunction::PowerSum { weights, .. } => weights.len(),
            FcmcFunction::Composite { parts, .. } => parts.first().map_or(0, |p| p.f.arity()),
        }
    }

    /// Structural validity (positive weights, exponents ≥ 1, equal arity).
    pub fn check(&self) -> Result<()> {
        let positive = |w: &[f64]| !w.is_empty() && w.iter().all(|x| x.is_finite() && *x > 0.0);
        match self {
            FcmcFunction::WeightedMax { weights }
            | FcmcFunction::InverseWeightedMax { weights }
            | FcmcFunction::WeightedSum { weights } => {
                if !positive(weights) {
                    return Err(Error::InvalidArgument("weights must be finite and > 0".into()));
                }
            }
            FcmcFunction::PowerSum { p, weights } => {
                if !positive(weights) || !(*p >= 1.0) {
                    return Err(Error::InvalidArgument("power sum needs p ≥ 1 and positive weights".into()));
                }
            }
            FcmcFunction::Composite { parts, power } => {
                if parts.is_empty() || !(*power >= 1.0) || !power.is_finite() {
                    return Err(Error::InvalidArgument("composite needs parts and a finite power ≥ 1".into()));
                }
                let n = self.arity();
                for part in parts {
                    if !(part.coef > 0.0 && part.coef.is_finite()) {
                        return Err(Error::InvalidArgument("composite coefficients must be > 0".into()));
                    }
                    part.f.check()?;
                    if part.f.arity() != n {
                        return Err(Error::DimensionMismatch { expected: n, found: part.f.arity() });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        match self {
            FcmcFunction::WeightedMax { weights } => t.iter().zip(weights).map(|(a, w)| w * a).fold(0.0, f64::max),
            FcmcFunction::InverseWeightedMax { weights } => {
                t.iter().zip(weights).map(|(a, w)| a / w).fold(0.0, f64::max)
            }
            FcmcFunction::WeightedSum { weights } => t.iter().zip(weights).map(|(a, w)| w * a).sum(),
            FcmcFunction::PowerSum { p, weights } => {
                if p.is_infinite() {
                    return FcmcFunction::WeightedMax { weights: weights.clone() }.eval(t);
                }
                // (Σ w tᵖ)^{1/p} = ‖(w^{1/p} t)‖_p
                let scaled: Vec<f64> = t.iter().zip(weights).map(|(a, w)| w.powf(1.0 / p) * a).collect();
                lp_norm(*p, &scaled)
            }
            FcmcFunction::Composite { parts, power } => {
                let inner: f64 = parts.iter().map(|q| q.coef * q.f.eval(t)).sum();
                inner.powf(*power)
            }
        }
    }

    /// A nonnegative subgradient at `t ≥ 0`.
    pub fn subgradient(&self, t: &[f64]) -> Vec<f64> {
        let n = t.len();
        let at_max = |vals: Vec<f64>, coef: &dyn Fn(usize) -> f64| {
            let mut i = 0;
            for (j, v) in vals.iter().enumerate() {
                if *v > vals[i] {
                    i = j;
                }
            }
            let mut g = vec![0.0; n];
            g[i] = coef(i);
            g
        };
        match self {
            FcmcFunction::WeightedMax { weights } => {
                at_max(t.iter().zip(weights).map(|(a, w)| w * a).collect(), &|i| weights[i])
            }
            FcmcFunction::InverseWeightedMax { weights } => {
                at_max(t.iter().zip(weights).map(|(a, w)| a / w).collect(), &|i| 1.0 / weights[i])
            }
            FcmcFunction::WeightedSum { weights } => weights.clone(),
            FcmcFunction::PowerSum { p, weights } => {
                if p.is_infinite() {
                    return FcmcFunction::WeightedMax { weights: weights.clone() }.subgradient(t);
                }
                if *p == 1.0 {
                    return weights.clone();
                }
                let val = self.eval(t);
                if val == 0.0 {
                    return vec![0.0; n];
                }
                t.iter().zip(weights).map(|(&a, &w)| w * (a / val).powf(p - 1.0)).collect()
            }
            FcmcFunction::Composite { parts, power } => {
                let inner: f64 = parts.iter().map(|q| q.coef * q.f.eval(t)).sum();
                let outer = if *power == 1.0 { 1.0 } else { power * inner.powf(power - 1.0) };
                let mut g = vec![0.0; n];
                for q in parts {
                    for (gi, si) in g.iter_mut().zip(q.f.subgradient(t)) {
                        *gi += outer * q.coef * si;
                    }
                }
                g
            }
        }
    }

    /// Whether minimising `f` over distance epigraphs is an LP.
    pub fn is_lp_representable(&self) -> bool {
        match self {
            FcmcFunction::WeightedMax { .. } | FcmcFunction::InverseWeightedMax { .. } | FcmcFunction::WeightedSum { .. } => true,
            FcmcFunction::PowerSum { p, .. } => *p == 1.0 || p.is_infinite(),
            FcmcFunction::Composite { parts, power } => *power == 1.0 && parts.iter().all(|q| q.f.is_lp_representable()),
        }
    }

    /// Objective expression whose minimum over the added variables equals
    /// `f(t)` when the `t` variables are fixed.
    pub(crate) fn add_objective(&self, lp: &mut LpBuilder, t: &[usize]) -> Option<AffineExpr> {
        let max_of = |lp: &mut LpBuilder, coefs: Vec<f64>| {
            let s = lp.add_var();
            for (&ti, c) in t.iter().zip(coefs) {
                lp.le_zero(AffineExpr::var(ti).scaled(c).plus_var(s, -1.0));
            }
            AffineExpr::var(s)
        };
        let sum_of = |coefs: &[f64]| {
            let mut e = AffineExpr::default();
            for (&ti, &c) in t.iter().zip(coefs) {
                e = e.plus_var(ti, c);
            }
            e
        };
        match self {
            FcmcFunction::WeightedMax { weights } => Some(max_of(lp, weights.clone())),
            FcmcFunction::InverseWeightedMax { weights } => Some(max_of(lp, weights.iter().map(|w| 1.0 / w).collect())),
            FcmcFunction::WeightedSum { weights } => Some(sum_of(weights)),
            FcmcFunction::PowerSum { p, weights } if *p == 1.0 => Some(sum_of(weights)),
            FcmcFunction::PowerSum { p, weights } if p.is_infinite() => Some(max_of(lp, weights.clone())),
            FcmcFunction::PowerSum { .. } => None,
            FcmcFunction::Composite { parts, power } => {
                if *power != 1.0 {
                    return None;
                }
                let mut e = AffineExpr::default();
                for q in parts {
                    let inner = q.f.add_objective(lp, t)?;
                    e = e.plus(&inner.scaled(q.coef));
                }
                Some(e)
            }
        }
    }

    /// Seeded spot checks of monotonicity, midpoint convexity and growth
    /// along rays. Membership in the class cannot be proved from an
    /// oracle; the report only says no violation was seen.
    pub fn sampled_check(&self, samples: usize, seed: u64) -> FcmcReport {
        let n = self.arity();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = Vec::new();
        for _ in 0..samples {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
            let b: Vec<f64> = a.iter().map(|x| x + rng.gen_range(0.0..2.0)).collect();
            let (fa, fb) = (self.eval(&a), self.eval(&b));
            if fa > fb * (1.0 + 1e-12) + 1e-12 {
                failures.push(format!("monotonicity: f({a:?}) = {fa} > f({b:?}) = {fb}"));
                break;
            }
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
            let mid: Vec<f64> = a.iter().zip(&c).map(|(x, y)| 0.5 * (x + y)).collect();
            let (fm, fc) = (self.eval(&mid), self.eval(&c));
            if fm > 0.5 * (fa + fc) * (1.0 + 1e-12) + 1e-12 {
                failures.push(format!("convexity at midpoint of {a:?} and {c:?}"));
                break;
            }
        }
        // f(λ e_i) must grow without bound along every axis.
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let f1 = self.eval(&e);
            e[i] = 1e6;
            if !(self.eval(&e) > 1e3 * f1.max(1e-12)) {
                failures.push(format!("coercivity along axis {i}"));
            }
        }
        FcmcReport { samples, seed, failures }
    }

    /// Empirical Lipschitz constant of `f` with respect to `‖·‖∞` on the box
    /// `[t₀ − r, t₀ + r] ∩ ℝ₊ᴺ`, sampled at mesh width `2r/(mesh − 1)`.
    pub fn lipschitz_estimate(&self, t0: &[f64], radius: f64, mesh: usize, samples: usize, seed: u64) -> f64 {
        let n = t0.len();
        let h = 2.0 * radius / (mesh.max(2) - 1) as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0.0_f64;
        for _ in 0..samples {
            let x: Vec<f64> = t0
                .iter()
                .map(|&c| {
                    let k = rng.gen_range(0..mesh.max(2) - 1) as f64;
                    (c - radius + k * h).max(0.0)
                })
                .collect();
            let y: Vec<f64> = x.iter().map(|&c| (c + if rng.gen_bool(0.5) { h } else { -h }).max(0.0)).collect();
            let d = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if d > 0.0 && n > 0 {
                best = best.max((self.eval(&x) - self.eval(&y)).abs() / d);
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FcmcReport {
    pub samples: usize,
    pub seed: u64,
    pub failures: Vec<String>,
}

impl FcmcReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions_for_weighted_max() {
        let t = [1.0, 2.0];
        assert_eq!(FcmcFunction::WeightedMax { weights: vec![3.0, 1.0] }.eval(&t), 3.0);
        assert_eq!(FcmcFunction::InverseWeightedMax { weights: vec![0.5, 4.0] }.eval(&t), 2.0);
    }

    #[test]
    fn composites_and_checks() {
        let f = FcmcFunction::Composite {
            parts: vec![
                CompositePart { coef: 1.0, f: FcmcFunction::max(3) },
                CompositePart { coef: 0.5, f: FcmcFunction::PowerSum { p: 2.0, weights: vec![1.0; 3] } },
            ],
            power: 2.0,
        };
        f.check().unwrap();
        assert!(f.sampled_check(500, 3).is_ok());
        assert!(!f.is_lp_representable());
        let bad = FcmcFunction::WeightedSum { weights: vec![1.0, 0.0] };
        assert!(bad.check().is_err());
    }

    #[test]
    fn power_sum_limits() {
        let t = [3.0, 4.0];
        let f2 = FcmcFunction::PowerSum { p: 2.0, weights: vec![1.0, 1.0] };
        assert!((f2.eval(&t) - 5.0).abs() < 1e-12);
        let finf = FcmcFunction::PowerSum { p: f64::INFINITY, weights: vec![1.0, 1.0] };
        assert_eq!(finf.eval(&t), 4.0);
    }

    #[test]
    fn lipschitz_estimate_is_stable_under_refinement() {
        let f = FcmcFunction::WeightedSum { weights: vec![1.0, 2.0, 0.5] };
        let coarse = f.lipschitz_estimate(&[1.0, 1.0, 1.0], 0.5, 5, 2000, 1);
        let fine = f.lipschitz_estimate(&[1.0, 1.0, 1.0], 0.5, 41, 2000, 1);
        assert!(coarse.is_finite() && fine.is_finite());
        assert!((coarse - 3.5).abs() < 1e-9 && (fine - 3.5).abs() < 1e-9);
    }
}
