//! LP encoding of `t ≥ ‖x‖` for polyhedral norms.
//!
//! Nested sums introduce one auxiliary variable per component norm. The
//! outer generators are nonnegative, so `t ≥ Σ g_i s_i, s_i ≥ ‖x(i)‖` is
//! equivalent to `t ≥ π(‖x(1)‖, …)` after projecting out the `s_i`.

use super::NormSpec;
use crate::opt::{AffineExpr, LpBuilder};

/// Add variables and constraints enforcing `t ≥ ‖x‖` and return `t`.
/// `None` when the norm has no exact LP encoding.
pub(crate) fn add_epigraph(space: &NormSpec, lp: &mut LpBuilder, x: &[AffineExpr]) -> Option<usize> {
    debug_assert_eq!(x.len(), space.dim());
    if !space.is_polyhedral() {
        return None;
    }
    let t = lp.add_var();
    match space {
        NormSpec::Polyhedral { generators } => {
            for g in generators {
                lp.le_zero(AffineExpr::combine(&g.0, x).plus_var(t, -1.0));
            }
        }
        NormSpec::Lp { p, .. } if p.is_infinite() => {
            for xi in x {
                lp.le_zero(xi.clone().plus_var(t, -1.0));
                lp.le_zero(xi.scaled(-1.0).plus_var(t, -1.0));
            }
        }
        NormSpec::Lp { .. } => {
            let u = lp.add_vars(x.len());
            for (xi, &ui) in x.iter().zip(&u) {
                lp.le_zero(xi.clone().plus_var(ui, -1.0));
                lp.le_zero(xi.scaled(-1.0).plus_var(ui, -1.0));
            }
            let mut sum = AffineExpr::var(t).scaled(-1.0);
            for ui in u {
                sum = sum.plus_var(ui, 1.0);
            }
            lp.le_zero(sum);
        }
        NormSpec::DirectSum { .. } | NormSpec::Esum { .. } => {
            let outer = space.outer_generators()?;
            let comps = space.components()?;
            let s: Vec<usize> = comps
                .iter()
                .zip(space.blocks())
                .map(|(c, r)| add_epigraph(c, lp, &x[r]))
                .collect::<Option<_>>()?;
            for g in outer {
                let mut e = AffineExpr::var(t).scaled(-1.0);
                for (gi, &si) in g.iter().zip(&s) {
                    if *gi != 0.0 {
                        e = e.plus_var(si, *gi);
                    }
                }
                lp.le_zero(e);
            }
        }
    }
    Some(t)
}

impl NormSpec {
    fn outer_generators(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            NormSpec::DirectSum { pi, .. } => Some(pi.generators.iter().map(|g| g.0.clone()).collect()),
            NormSpec::Esum { e_norm, .. } => e_norm.monotone_generators(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::{make_direct_sum, MonotonePolyhedralNorm};
    use crate::opt::lp_solve;

    /// Minimising `t` with `x` fixed must return exactly `‖x‖`.
    fn lp_norm_value(space: &NormSpec, x: &[f64]) -> f64 {
        let mut b = LpBuilder::new();
        let xs: Vec<AffineExpr> = x.iter().map(|&c| AffineExpr::constant(c)).collect();
        let t = add_epigraph(space, &mut b, &xs).unwrap();
        b.set_objective(&AffineExpr::var(t));
        lp_solve(&b.build()).unwrap().value.unwrap()
    }

    #[test]
    fn epigraph_matches_evaluation() {
        let x = [0.4, -1.5, 2.0, 0.25];
        let spaces = [
            NormSpec::l1(4),
            NormSpec::linf(4),
            NormSpec::polyhedral(vec![vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, -1.0], vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0]])
                .unwrap(),
            make_direct_sum(vec![NormSpec::l1(2), NormSpec::linf(2)], MonotonePolyhedralNorm::sum(2)).unwrap(),
            make_direct_sum(
                vec![NormSpec::l1(1), NormSpec::linf(3)],
                MonotonePolyhedralNorm::new(vec![vec![1.0, 0.5], vec![0.2, 1.0]]).unwrap(),
            )
            .unwrap(),
        ];
        for s in &spaces {
            assert!((lp_norm_value(s, &x) - s.norm(&x)).abs() < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn smooth_norms_have_no_encoding() {
        let mut b = LpBuilder::new();
        let xs = vec![AffineExpr::constant(1.0); 2];
        assert!(add_epigraph(&NormSpec::l2(2), &mut b, &xs).is_none());
    }
}
