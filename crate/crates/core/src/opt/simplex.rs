//! Dense two-phase simplex over free variables.
//!
//! Problems are stated as `min cᵀu  s.t.  A u ≤ b,  C u = d` with `u` free.
//! Internally each free variable is split into `u⁺ − u⁻`, every inequality
//! gets a slack and rows whose slack cannot start basic get an artificial
//! column. Pivoting follows Bland's rule (lowest eligible index enters,
//! lowest basic index leaves on ratio ties) so the run is deterministic.

use serde::{Deserialize, Serialize};

use crate::linalg::{dot, max_abs};
use crate::{Error, Result, FEAS_TOL};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;

/// `min cᵀu` subject to `A u ≤ b` and `C u = d`, all variables free.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub ineq_matrix: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
    #[serde(default)]
    pub eq_matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub eq_rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.num_vars();
        if self.ineq_matrix.len() != self.ineq_rhs.len() || self.eq_matrix.len() != self.eq_rhs.len() {
            return Err(Error::InvalidArgument("constraint rows and right-hand sides differ in count".into()));
        }
        for row in self.ineq_matrix.iter().chain(&self.eq_matrix) {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        let all_finite = self
            .objective
            .iter()
            .chain(self.ineq_rhs.iter())
            .chain(self.eq_rhs.iter())
            .chain(self.ineq_matrix.iter().flatten())
            .chain(self.eq_matrix.iter().flatten())
            .all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// Largest violation of any constraint at `u` (0 when feasible).
    pub fn max_violation(&self, u: &[f64]) -> f64 {
        let ineq = self
            .ineq_matrix
            .iter()
            .zip(&self.ineq_rhs)
            .map(|(row, b)| (dot(row, u) - b).max(0.0));
        let eq = self.eq_matrix.iter().zip(&self.eq_rhs).map(|(row, d)| (dot(row, u) - d).abs());
        ineq.chain(eq).fold(0.0, f64::max)
    }

    /// Largest constraint violation, each row measured relative to
    /// `max(1, |rhs|)`.
    pub fn scaled_violation(&self, u: &[f64]) -> f64 {
        let ineq = self
            .ineq_matrix
            .iter()
            .zip(&self.ineq_rhs)
            .map(|(row, b)| (dot(row, u) - b).max(0.0) / b.abs().max(1.0));
        let eq = self
            .eq_matrix
            .iter()
            .zip(&self.eq_rhs)
            .map(|(row, d)| (dot(row, u) - d).abs() / d.abs().max(1.0));
        ineq.chain(eq).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Multipliers attached to the inequality rows (`ineq`, always `≥ 0`) and
/// equality rows (`eq`, free).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    pub ineq: Vec<f64>,
    pub eq: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// KKT multipliers: `c + Aᵀy + Cᵀz = 0`, `y ≥ 0`, dual value `−bᵀy − dᵀz`.
    Dual(Multipliers),
    /// Farkas witness: `y ≥ 0`, `Aᵀy + Cᵀz = 0` and `bᵀy + dᵀz < 0`.
    Farkas(Multipliers),
    /// Feasible point plus a recession direction along which `cᵀu` decreases.
    Ray { point: Vec<f64>, direction: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub point: Option<Vec<f64>>,
    pub value: Option<f64>,
    pub certificate: Certificate,
    pub pivots: usize,
}

/// Result of checking a Farkas certificate against its system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarkasCheck {
    /// `max |Aᵀy + Cᵀz|`, should vanish.
    pub residual: f64,
    /// `bᵀy + dᵀz`, should be strictly negative.
    pub gap: f64,
    pub min_multiplier: f64,
    pub valid: bool,
}

impl Multipliers {
    fn combination(&self, lp: &LinearProgram) -> Vec<f64> {
        let mut g = vec![0.0; lp.num_vars()];
        for (row, &y) in lp.ineq_matrix.iter().zip(&self.ineq) {
            crate::linalg::axpy(y, row, &mut g);
        }
        for (row, &z) in lp.eq_matrix.iter().zip(&self.eq) {
            crate::linalg::axpy(z, row, &mut g);
        }
        g
    }

    fn rhs(&self, lp: &LinearProgram) -> f64 {
        dot(&self.ineq, &lp.ineq_rhs) + dot(&self.eq, &lp.eq_rhs)
    }

    /// Verify a Farkas certificate: the multipliers combine the rows of `lp`
    /// into `0 ≤ gap` with `gap < −1e-9`.
    pub fn check_farkas(&self, lp: &LinearProgram) -> FarkasCheck {
        let residual = max_abs(&self.combination(lp));
        let gap = self.rhs(lp);
        let min_multiplier = self.ineq.iter().copied().fold(f64::INFINITY, f64::min);
        let sizes_ok = self.ineq.len() == lp.ineq_rhs.len() && self.eq.len() == lp.eq_rhs.len();
        let valid = sizes_ok && residual <= FEAS_TOL && gap < -FEAS_TOL && min_multiplier >= 0.0;
        FarkasCheck { residual, gap, min_multiplier, valid }
    }

    /// Stationarity residual `max |c + Aᵀy + Cᵀz|` and the dual objective.
    pub fn check_dual(&self, lp: &LinearProgram) -> (f64, f64) {
        let mut g = self.combination(lp);
        for (gi, ci) in g.iter_mut().zip(&lp.objective) {
            *gi += ci;
        }
        (max_abs(&g), -self.rhs(lp))
    }
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn farkas(&self) -> Option<&Multipliers> {
        match &self.certificate {
            Certificate::Farkas(m) => Some(m),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced-cost row for the current phase.
    costs: Vec<f64>,
    ncols: usize,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x /= p;
        }
        self.rhs[r] /= p;
        self.rows[r][c] = 1.0;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for (x, pr) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *x -= f * pr;
                }
                self.rows[i][c] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
                if self.rhs[i].abs() < 1e-14 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let f = self.costs[c];
        if f != 0.0 {
            for (x, pr) in self.costs.iter_mut().zip(&pivot_row) {
                *x -= f * pr;
            }
            self.costs[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let mut rc = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (x, t) in rc.iter_mut().zip(&self.rows[r]) {
                    *x -= cb * t;
                }
            }
        }
        for &b in &self.basis {
            rc[b] = 0.0;
        }
        self.costs = rc;
    }

    /// Run Bland's rule until optimal. Returns the unbounded entering column
    /// if one appears.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<Option<usize>> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::LpBreakdown(format!("pivot limit {MAX_PIVOTS} exceeded")));
            }
            let Some(enter) = (0..self.ncols).find(|&j| allowed(j) && self.costs[j] < -COST_TOL) else {
                return Ok(None);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i].max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((j, best)) => {
                            let tie = (ratio - best).abs() <= 1e-12 * best.abs().max(1.0);
                            if ratio < best && !tie || tie && self.basis[i] < self.basis[j] {
                                Some((i, ratio))
                            } else {
                                Some((j, best))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(Some(enter)),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

/// Solve `lp`. Numerical trouble (pivot limit, certificates that fail their
/// own check) is returned as [`Error::LpBreakdown`], never as a status.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.check_shape()?;
    let n = lp.num_vars();
    let mi = lp.ineq_rhs.len();
    let me = lp.eq_rhs.len();
    let m = mi + me;

    // Column layout: [u⁺ (n) | u⁻ (n) | slacks (mi) | artificials (m)].
    let slack0 = 2 * n;
    let art0 = slack0 + mi;
    let ncols = art0 + m;

    let mut sign = vec![1.0; m];
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    // Column that formed the identity for each row at start; B⁻¹ is read off
    // these columns at the end.
    let mut unit_col = Vec::with_capacity(m);
    for i in 0..m {
        let (coeffs, b) = if i < mi {
            (&lp.ineq_matrix[i], lp.ineq_rhs[i])
        } else {
            (&lp.eq_matrix[i - mi], lp.eq_rhs[i - mi])
        };
        let s = if b < 0.0 { -1.0 } else { 1.0 };
        sign[i] = s;
        let mut row = vec![0.0; ncols];
        for j in 0..n {
            row[j] = s * coeffs[j];
            row[n + j] = -s * coeffs[j];
        }
        if i < mi {
            row[slack0 + i] = s;
        }
        row[art0 + i] = 1.0;
        let start = if i < mi && s > 0.0 { slack0 + i } else { art0 + i };
        basis.push(start);
        unit_col.push(start);
        rows.push(row);
        rhs.push(s * b);
    }

    let mut t = Tableau { rows, rhs, basis, costs: vec![0.0; ncols], ncols, pivots: 0 };
    let is_art = |j: usize| j >= art0;
    let used_art: Vec<bool> = (0..m).map(|i| unit_col[i] == art0 + i).collect();

    // Phase 1.
    let mut phase1_cost = vec![0.0; ncols];
    for i in 0..m {
        if used_art[i] {
            phase1_cost[art0 + i] = 1.0;
        }
    }
    let unused_art = |j: usize| j >= art0 && !used_art[j - art0];
    if used_art.iter().any(|&a| a) {
        t.set_costs(&phase1_cost);
        let unb = t.optimize(&|j| !unused_art(j))?;
        if unb.is_some() {
            return Err(Error::LpBreakdown("phase 1 reported unbounded".into()));
        }
        let infeas: f64 = (0..m).filter(|&i| is_art(t.basis[i])).map(|i| t.rhs[i]).sum();
        let scale = max_abs(&lp.ineq_rhs).max(max_abs(&lp.eq_rhs)).max(1.0);
        if infeas > FEAS_TOL * scale {
            let lambda: Vec<f64> = (0..m).map(|i| phase1_cost[unit_col[i]] - t.costs[unit_col[i]]).collect();
            let mut mult = multipliers_from_duals(&lambda, &sign, mi);
            normalize(&mut mult);
            let check = mult.check_farkas(lp);
            if !check.valid {
                return Err(Error::LpBreakdown(format!(
                    "infeasibility {infeas:e} detected but certificate does not verify (residual {:e}, gap {:e})",
                    check.residual, check.gap
                )));
            }
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                point: None,
                value: None,
                certificate: Certificate::Farkas(mult),
                pivots: t.pivots,
            });
        }
        // Drive remaining artificials out of the basis where possible.
        for r in 0..m {
            if is_art(t.basis[r]) {
                if let Some(c) = (0..art0).find(|&j| t.rows[r][j].abs() > 1e-9) {
                    t.pivot(r, c);
                }
            }
        }
    }

    // Phase 2.
    let mut cost = vec![0.0; ncols];
    for j in 0..n {
        cost[j] = lp.objective[j];
        cost[n + j] = -lp.objective[j];
    }
    t.set_costs(&cost);
    let unbounded = t.optimize(&|j| j < art0)?;

    let mut x = vec![0.0; ncols];
    for (r, &b) in t.basis.iter().enumerate() {
        x[b] = t.rhs[r];
    }
    let point: Vec<f64> = (0..n).map(|j| x[j] - x[n + j]).collect();

    if let Some(enter) = unbounded {
        let mut d = vec![0.0; ncols];
        d[enter] = 1.0;
        for (r, &b) in t.basis.iter().enumerate() {
            d[b] = -t.rows[r][enter];
        }
        let direction: Vec<f64> = (0..n).map(|j| d[j] - d[n + j]).collect();
        return Ok(LpOutcome {
            status: LpStatus::Unbounded,
            point: None,
            value: None,
            certificate: Certificate::Ray { point, direction },
            pivots: t.pivots,
        });
    }

    let violation = lp.scaled_violation(&point);
    if violation > FEAS_TOL {
        return Err(Error::LpBreakdown(format!("optimal point violates constraints by {violation:e}")));
    }
    let lambda: Vec<f64> = (0..m).map(|i| cost[unit_col[i]] - t.costs[unit_col[i]]).collect();
    let mult = multipliers_from_duals(&lambda, &sign, mi);
    let value = dot(&lp.objective, &point);
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        point: Some(point),
        value: Some(value),
        certificate: Certificate::Dual(mult),
        pivots: t.pivots,
    })
}

fn multipliers_from_duals(lambda: &[f64], sign: &[f64], mi: usize) -> Multipliers {
    let y: Vec<f64> = (0..mi).map(|i| (-lambda[i] * sign[i]).max(0.0)).collect();
    let z: Vec<f64> = (mi..lambda.len()).map(|i| -lambda[i] * sign[i]).collect();
    Multipliers { ineq: y, eq: z }
}

fn normalize(m: &mut Multipliers) {
    let s = max_abs(&m.ineq).max(max_abs(&m.eq));
    if s > 0.0 {
        m.ineq.iter_mut().for_each(|x| *x /= s);
        m.eq.iter_mut().for_each(|x| *x /= s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(obj: &[f64], a: &[&[f64]], b: &[f64]) -> LinearProgram {
        LinearProgram {
            objective: obj.to_vec(),
            ineq_matrix: a.iter().map(|r| r.to_vec()).collect(),
            ineq_rhs: b.to_vec(),
            ..Default::default()
        }
    }

    #[test]
    fn min_u_with_u_at_least_one() {
        let out = lp_solve(&lp(&[1.0], &[&[-1.0]], &[-1.0])).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.value.unwrap() - 1.0).abs() < 1e-12);
        let Certificate::Dual(m) = &out.certificate else { panic!() };
        assert!((m.ineq[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_interval() {
        // u ≤ 0 and u ≥ 1.
        let p = lp(&[0.0], &[&[1.0], &[-1.0]], &[0.0, -1.0]);
        let out = lp_solve(&p).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        assert!(out.farkas().unwrap().check_farkas(&p).valid);
    }

    #[test]
    fn unbounded_ray() {
        let p = lp(&[-1.0, 0.0], &[&[0.0, 1.0]], &[1.0]);
        let out = lp_solve(&p).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
        let Certificate::Ray { direction, .. } = out.certificate else { panic!() };
        assert!(direction[0] > 0.0);
    }

    #[test]
    fn equality_rows_and_redundancy() {
        // min u1 + u2, u1 + u2 = 2 twice, u ≥ 0.
        let mut p = lp(&[1.0, 2.0], &[&[-1.0, 0.0], &[0.0, -1.0]], &[0.0, 0.0]);
        p.eq_matrix = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        p.eq_rhs = vec![2.0, 4.0];
        let out = lp_solve(&p).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.value.unwrap() - 2.0).abs() < 1e-12);
        let Certificate::Dual(m) = &out.certificate else { panic!() };
        let (res, dual) = m.check_dual(&p);
        assert!(res < 1e-9 && (dual - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bad_shape_is_an_error() {
        let p = lp(&[1.0, 1.0], &[&[1.0]], &[1.0]);
        assert!(lp_solve(&p).is_err());
    }
}
