use super::LinearProgram;

/// Affine expression `Σ coef·u_var + constant` over LP variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AffineExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl AffineExpr {
    pub fn constant(c: f64) -> Self {
        AffineExpr { terms: Vec::new(), constant: c }
    }

    pub fn var(v: usize) -> Self {
        AffineExpr { terms: vec![(v, 1.0)], constant: 0.0 }
    }

    pub fn scaled(&self, s: f64) -> Self {
        AffineExpr {
            terms: self.terms.iter().map(|&(v, c)| (v, c * s)).collect(),
            constant: self.constant * s,
        }
    }

    pub fn plus(mut self, other: &AffineExpr) -> Self {
        self.terms.extend_from_slice(&other.terms);
        self.constant += other.constant;
        self
    }

    pub fn plus_var(mut self, v: usize, c: f64) -> Self {
        self.terms.push((v, c));
        self
    }

    /// `Σ weights_k · exprs_k`.
    pub fn combine(weights: &[f64], exprs: &[AffineExpr]) -> Self {
        let mut out = AffineExpr::default();
        for (w, e) in weights.iter().zip(exprs) {
            if *w != 0.0 {
                out = out.plus(&e.scaled(*w));
            }
        }
        out
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(v, c)| c * u[v]).sum::<f64>()
    }
}

/// Incremental construction of a [`LinearProgram`] with free variables.
#[derive(Clone, Debug, Default)]
pub struct LpBuilder {
    num_vars: usize,
    objective: Vec<(usize, f64)>,
    ineqs: Vec<AffineExpr>,
    eqs: Vec<AffineExpr>,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    pub fn add_vars(&mut self, k: usize) -> Vec<usize> {
        (0..k).map(|_| self.add_var()).collect()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Adds the constraint `expr ≤ 0`.
    pub fn le_zero(&mut self, expr: AffineExpr) {
        self.ineqs.push(expr);
    }

    /// Adds `lhs ≤ rhs`.
    pub fn le(&mut self, lhs: &AffineExpr, rhs: &AffineExpr) {
        self.ineqs.push(lhs.clone().plus(&rhs.scaled(-1.0)));
    }

    /// Adds `expr = 0`.
    pub fn eq_zero(&mut self, expr: AffineExpr) {
        self.eqs.push(expr);
    }

    pub fn set_objective(&mut self, expr: &AffineExpr) {
        self.objective = expr.terms.clone();
    }

    pub fn build(&self) -> LinearProgram {
        let n = self.num_vars;
        let dense = |e: &AffineExpr| {
            let mut row = vec![0.0; n];
            for &(v, c) in &e.terms {
                row[v] += c;
            }
            row
        };
        let mut objective = vec![0.0; n];
        for &(v, c) in &self.objective {
            objective[v] += c;
        }
        LinearProgram {
            objective,
            ineq_matrix: self.ineqs.iter().map(dense).collect(),
            ineq_rhs: self.ineqs.iter().map(|e| -e.constant).collect(),
            eq_matrix: self.eqs.iter().map(dense).collect(),
            eq_rhs: self.eqs.iter().map(|e| -e.constant).collect(),
        }
    }
}
