//! Best constrained and simultaneous approximation in finite-dimensional
//! normed spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`norm`] describes norms on `ℝⁿ` (polyhedral, `ℓ_p`, polyhedral direct
//!   sums and E-sums), subspaces and balls.
//! * [`opt`] is a small dense simplex solver with dual and Farkas
//!   certificates, plus a restarted subgradient method.
//! * [`centers`] computes restricted f-centers `rad_V^f(F)` and probes
//!   δ-centers, property (P₁) and SACP behaviour.
//! * [`balls`] decides ball-intersection problems and checks subspace
//!   properties (central, A-C, almost constrained, locally constrained,
//!   M-ideal via the 3-ball property) and the projection constructions that
//!   transport them.
//! * [`sequences`] holds exact rational models of `c₀`/`ℓ₁` functionals with
//!   geometric tails.
//! * [`repro`] and [`report`] script the built-in reproductions used by the
//!   `centerlab` command-line tool.
//!
//! ```
//! use centerlab::norm::{NormSpec, Vector};
//!
//! let linf = NormSpec::linf(3);
//! let x = Vector::from([1.5, -1.5, -1.5]);
//! assert_eq!(linf.eval(&x).unwrap(), 1.5);
//! ```

pub mod balls;
pub mod centers;
mod error;
pub(crate) mod linalg;
pub mod norm;
pub mod opt;
pub mod repro;
pub mod report;
pub mod sequences;

pub use error::{Error, Result};

/// Feasibility tolerance shared by every floating-point module.
pub const FEAS_TOL: f64 = 1e-9;
