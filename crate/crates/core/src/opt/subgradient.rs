use serde::{Deserialize, Serialize};

use crate::linalg::norm2;

/// Step schedule `a/(k+b)` along the normalised subgradient, restarted from
/// the best point with `a` shrunk by `shrink` after every round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgradientConfig {
    /// Iterations per round.
    pub iters_per_round: usize,
    pub rounds: usize,
    pub step_a: f64,
    pub step_b: f64,
    pub shrink: f64,
    /// A round that improves the best value by less than this (absolute)
    /// counts as converged.
    pub tolerance: f64,
}

impl Default for SubgradientConfig {
    fn default() -> Self {
        SubgradientConfig {
            iters_per_round: 2000,
            rounds: 14,
            step_a: 1.0,
            step_b: 10.0,
            shrink: 0.35,
            tolerance: 1e-10,
        }
    }
}

impl SubgradientConfig {
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.step_a = scale.max(1e-6);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgradientOutcome {
    pub value: f64,
    pub point: Vec<f64>,
    /// Value at every iterate, in order.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl SubgradientOutcome {
    /// Running minimum of the trace.
    pub fn running_best(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.trace
            .iter()
            .map(|&v| {
                best = best.min(v);
                best
            })
            .collect()
    }
}

/// Minimise a convex function given by a value/subgradient oracle over a
/// convex set given by a projector.
///
/// Running out of rounds before two consecutive rounds agree within the
/// tolerance still returns the best point, with `converged == false`.
pub fn subgradient_minimize<O, P>(objective: O, project: P, start: &[f64], cfg: &SubgradientConfig) -> SubgradientOutcome
where
    O: Fn(&[f64]) -> (f64, Vec<f64>),
    P: Fn(&mut [f64]),
{
    let mut x = start.to_vec();
    project(&mut x);
    let (mut best_val, _) = objective(&x);
    let mut best = x.clone();
    let mut trace = vec![best_val];
    let mut converged = false;
    let mut iterations = 0;
    let mut a = cfg.step_a;

    for _ in 0..cfg.rounds.max(1) {
        let round_start = best_val;
        x.clone_from(&best);
        for k in 0..cfg.iters_per_round.max(1) {
            let (val, g) = objective(&x);
            iterations += 1;
            trace.push(val);
            if val < best_val {
                best_val = val;
                best.clone_from(&x);
            }
            let gn = norm2(&g);
            if gn == 0.0 {
                // 0 ∈ ∂f(x): x is optimal.
                return SubgradientOutcome { value: best_val, point: best, trace, iterations, converged: true };
            }
            let step = a / (k as f64 + cfg.step_b);
            for (xi, gi) in x.iter_mut().zip(&g) {
                *xi -= step * gi / gn;
            }
            project(&mut x);
        }
        if round_start - best_val < cfg.tolerance && a < cfg.step_a {
            converged = true;
            break;
        }
        a *= cfg.shrink;
    }
    SubgradientOutcome { value: best_val, point: best, trace, iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_norm_goes_to_zero() {
        let out = subgradient_minimize(
            |x| {
                let n = norm2(x);
                let g = if n > 0.0 { x.iter().map(|v| v / n).collect() } else { vec![0.0; x.len()] };
                (n, g)
            },
            |_| {},
            &[3.0, -4.0],
            &SubgradientConfig::default().with_scale(5.0),
        );
        assert!(out.value < 1e-6, "{}", out.value);
        let best = out.running_best();
        assert!(best.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn two_point_chebyshev_is_the_midpoint() {
        let (p, q) = ([0.0, 0.0], [2.0, 2.0]);
        let f = |x: &[f64]| {
            let dp = norm2(&[x[0] - p[0], x[1] - p[1]]);
            let dq = norm2(&[x[0] - q[0], x[1] - q[1]]);
            if dp >= dq {
                (dp, vec![(x[0] - p[0]) / dp, (x[1] - p[1]) / dp])
            } else {
                (dq, vec![(x[0] - q[0]) / dq, (x[1] - q[1]) / dq])
            }
        };
        let out = subgradient_minimize(f, |_| {}, &[5.0, -1.0], &SubgradientConfig::default().with_scale(4.0));
        assert!((out.value - 2f64.sqrt()).abs() < 1e-6);
        assert!((out.point[0] - 1.0).abs() < 1e-3 && (out.point[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn projection_is_respected() {
        // min |x - 3| over x ≤ 1.
        let out = subgradient_minimize(
            |x| ((x[0] - 3.0).abs(), vec![(x[0] - 3.0).signum()]),
            |x| x[0] = x[0].min(1.0),
            &[-2.0],
            &SubgradientConfig::default(),
        );
        assert!((out.value - 2.0).abs() < 1e-9);
    }
}
