//! The guide's chapters as doc comments, so `cargo test` runs every snippet
//! in the book against the current crate.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/sorting.md")]
pub mod sorting {}
#[doc = include_str!("../../../book/src/surrogates.md")]
pub mod surrogates {}
#[doc = include_str!("../../../book/src/indicators.md")]
pub mod indicators {}
#[doc = include_str!("../../../book/src/strategies.md")]
pub mod strategies {}
#[doc = include_str!("../../../book/src/optimizer.md")]
pub mod optimizer {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("../../../book/src/external.md")]
pub mod external {}
