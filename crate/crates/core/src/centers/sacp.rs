//! Minimising sequences and their cluster points.
//!
//! In finite dimension the weak and norm topologies coincide, so clusters
//! are detected in the norm of the space.

use serde::{Deserialize, Serialize};

use super::CenterProblem;
use crate::norm::Vector;
use crate::{Error, Result};

pub const TOPOLOGY_NOTE: &str = "weak topology coincides with the norm topology in finite dimension; clusters use the norm";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Index of the element that seeded the cluster.
    pub representative: usize,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClusterOutcome {
    Clusters { clusters: Vec<Cluster> },
    NoneWithinHorizon { min_pairwise_distance: f64, pair: (usize, usize) },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SacpVerdict {
    /// `|r_f(v_h, F) − rad| ≤ tol` at the last element inside the horizon.
    pub minimizing: bool,
    pub rad: f64,
    pub values: Vec<f64>,
    pub outcome: ClusterOutcome,
    pub topology: String,
}

/// Take the first `horizon` elements of `sequence`, check that each lies in
/// the feasible set, that the values approach `rad`, and group elements
/// lying within `cluster_tol` of a seed element.
pub fn sacp_experiment<I>(
    problem: &CenterProblem,
    rad: f64,
    sequence: I,
    horizon: usize,
    cluster_tol: f64,
    tol: f64,
) -> Result<SacpVerdict>
where
    I: IntoIterator<Item = Vector>,
{
    problem.check()?;
    let seq: Vec<Vector> = sequence.into_iter().take(horizon).collect();
    if seq.is_empty() {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    let mut values = Vec::with_capacity(seq.len());
    for (index, v) in seq.iter().enumerate() {
        if v.dim() != problem.space.dim() {
            return Err(Error::DimensionMismatch { expected: problem.space.dim(), found: v.dim() });
        }
        if !problem.contains(v, crate::FEAS_TOL) {
            let residual = problem
                .pieces()
                .iter()
                .map(|p| p.directions.residual(v.sub(&p.offset).coords()))
                .fold(f64::INFINITY, f64::min);
            return Err(Error::OutsideFeasibleSet { index, residual });
        }
        values.push(problem.rf(v.coords()));
    }
    let minimizing = (values[values.len() - 1] - rad).abs() <= tol;

    let space = &problem.space;
    let mut assigned = vec![false; seq.len()];
    let mut clusters = Vec::new();
    for i in 0..seq.len() {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (i..seq.len())
            .filter(|&j| !assigned[j] && space.dist(seq[i].coords(), seq[j].coords()) <= cluster_tol)
            .collect();
        if members.len() >= 2 {
            for &j in &members {
                assigned[j] = true;
            }
            clusters.push(Cluster { representative: i, members });
        }
    }
    let outcome = if clusters.is_empty() {
        let (mut best, mut pair) = (f64::INFINITY, (0, 0));
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                let d = space.dist(seq[i].coords(), seq[j].coords());
                if d < best {
                    best = d;
                    pair = (i, j);
                }
            }
        }
        ClusterOutcome::NoneWithinHorizon { min_pairwise_distance: best, pair }
    } else {
        ClusterOutcome::Clusters { clusters }
    };
    Ok(SacpVerdict { minimizing, rad, values, outcome, topology: TOPOLOGY_NOTE.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centers::{solve_center, FcmcFunction, FeasibleSet, FiniteSet};
    use crate::norm::{NormSpec, Subspace};

    #[test]
    fn constant_sequence_at_minimizer() {
        let problem = CenterProblem {
            space: NormSpec::l1(2),
            feasible: FeasibleSet::Whole,
            points: FiniteSet::new(vec![Vector::from([0.0, 0.0]), Vector::from([2.0, 0.0])]).unwrap(),
            f: FcmcFunction::max(2),
        };
        let r = solve_center(&problem).unwrap();
        let verdict = sacp_experiment(&problem, r.rad, std::iter::repeat(r.minimizer.clone()), 10, 1e-9, 1e-8).unwrap();
        assert!(verdict.minimizing);
        match verdict.outcome {
            ClusterOutcome::Clusters { clusters } => assert_eq!(clusters.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn outside_points_are_rejected_with_index() {
        let problem = CenterProblem {
            space: NormSpec::l1(2),
            feasible: FeasibleSet::Subspace { subspace: Subspace::coordinate(2, &[0]).unwrap() },
            points: FiniteSet::new(vec![Vector::from([0.0, 0.0])]).unwrap(),
            f: FcmcFunction::max(1),
        };
        let seq = vec![Vector::from([1.0, 0.0]), Vector::from([1.0, 1.0])];
        match sacp_experiment(&problem, 0.0, seq, 5, 0.1, 1e-9) {
            Err(Error::OutsideFeasibleSet { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }
}
