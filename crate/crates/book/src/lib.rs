//! The guide's chapters as doc comments, so `cargo test` runs their snippets.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/norms.md")]
pub mod norms {}
#[doc = include_str!("../../../book/src/linear-programs.md")]
pub mod linear_programs {}
#[doc = include_str!("../../../book/src/centers.md")]
pub mod centers {}
#[doc = include_str!("../../../book/src/ball-intersections.md")]
pub mod ball_intersections {}
#[doc = include_str!("../../../book/src/projections.md")]
pub mod projections {}
#[doc = include_str!("../../../book/src/sequences.md")]
pub mod sequences {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
