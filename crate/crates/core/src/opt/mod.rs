//! Optimization kernel: a dense simplex solver with certificates, an
//! incremental LP builder, and a restarted subgradient method.

mod builder;
mod simplex;
mod subgradient;

pub use builder::{AffineExpr, LpBuilder};
pub use simplex::{lp_solve, Certificate, FarkasCheck, LinearProgram, LpOutcome, LpStatus, Multipliers};
pub use subgradient::{subgradient_minimize, SubgradientConfig, SubgradientOutcome};

use serde::{Deserialize, Serialize};

/// Which route produced a numeric answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolvePath {
    /// Closed form (degenerate or Euclidean cases).
    Exact,
    Lp,
    Subgradient,
}
